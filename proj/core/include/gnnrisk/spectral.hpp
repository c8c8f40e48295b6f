#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gnnrisk/types.hpp"

namespace gnnrisk {

/// Eigenpairs of a real symmetric matrix. eigenvalues are non-increasing;
/// column i of `eigenvectors` belongs to eigenvalues[i]. Each eigenvector is
/// signed so that its largest-magnitude entry is non-negative.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }

  /// V diag(mu) V^T.
  Matrix reconstruct() const;

  /// Coordinates V^T x of a vector in this eigenbasis.
  Vector coordinates(const Vector& x) const;
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-9;
};

/// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm drops below
/// relative_tolerance * ||a||_F. Throws not-symmetric when some
/// |a_ij - a_ji| exceeds symmetry_tolerance * max(1, max|a|).
SpectralDecomposition eigh_symmetric(const Matrix& a, const JacobiOptions& options = {});

/// Spectrum model mu_i = i^(-beta), i = 1..d.
struct DecaySpectrum {
  std::size_t dim = 0;
  double beta = 0.0;
  Vector values;

  /// The same spectrum in the coordinate basis (V = I).
  SpectralDecomposition as_decomposition() const;
};

DecaySpectrum synthetic_spectrum(std::size_t d, double beta);

inline constexpr std::size_t kDefaultDecayHead = 100;

/// Negated OLS slope of log(mu_i) on log(i) over the first `head` values.
/// `head` is clipped to values.size(); at least two points are required.
double fit_decay_rate(std::span<const double> values, std::size_t head = kDefaultDecayHead);

/// Spectrum of G^L: same eigenvectors, eigenvalues raised to L (re-sorted
/// when negative eigenvalues change the order).
SpectralDecomposition stack_spectrum(const SpectralDecomposition& dec, int layers);

/// True iff mu_i(G^(L+1)) / mu_j(G^(L+1)) > mu_i(G^L) / mu_j(G^L), with
/// 1-based indices i and j. Analytically this is mu_i > mu_j.
bool ratio_amplification_check(const SpectralDecomposition& dec, std::size_t i, std::size_t j,
                               int layers);

/// Coefficient of variation (stddev / mean) of the first `head` values.
double coefficient_of_variation(std::span<const double> values, std::size_t head);

/// Spearman rank correlation, average ranks for ties.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

// Exports. CSV: "index,eigenvalue" header, 1-based index. JSON:
// {"eigenvalues": [...], "eigenvectors": [[...], ...]} with one inner array per
// eigenvector.
std::string spectrum_to_csv(std::span<const double> eigenvalues);
std::string decomposition_to_json(const SpectralDecomposition& dec);

}  // namespace gnnrisk
