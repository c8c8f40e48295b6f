#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnnrisk/graph.hpp"
#include "gnnrisk/spectral.hpp"
#include "gnnrisk/types.hpp"

namespace gnnrisk {

struct FeatureMatrix {
  Matrix values;  // n x d, i.i.d. N(0, 1)
  std::uint64_t seed = 0;
};

/// Entries are drawn in row-major order from one Rng(seed) stream.
FeatureMatrix sample_features(std::size_t n, std::size_t d, std::uint64_t seed);

/// Aggregated samples D (row i is m_i) with M^ = D^T D / n and, unless
/// built without it, the eigendecomposition of M^.
struct AggregationDataset {
  Matrix samples;
  Matrix covariance;
  SpectralDecomposition spectral;
  double noise_sigma = 1.0;
  int layers = 1;
  bool symmetrized = false;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(samples.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(samples.cols()); }
  bool has_spectral() const noexcept { return spectral.dim() == dim() && dim() > 0; }
  double covariance_trace() const { return covariance.trace(); }

  static AggregationDataset from_samples(Matrix samples, double noise_sigma, int layers = 1,
                                         bool symmetrized = false, bool decompose = true);

  /// Rows picked by index, covariance recomputed on them. The subset is not
  /// symmetrized even when this dataset is.
  AggregationDataset subset(std::span<const std::size_t> rows, bool decompose = false) const;
};

/// D = G^L X by L successive products.
AggregationDataset aggregate(const GraphOperator& op, const FeatureMatrix& x, int layers,
                             double noise_sigma);

/// Rows m = V diag(sqrt(mu)) z with z ~ N(0, I). With `symmetrize`, row
/// n + i is -m_i, so the dataset has 2n rows.
AggregationDataset sample_from_spectrum(const SpectralDecomposition& spec, std::size_t n,
                                        double noise_sigma, std::uint64_t seed,
                                        bool symmetrize = false);
AggregationDataset sample_from_spectrum(const DecaySpectrum& spec, std::size_t n,
                                        double noise_sigma, std::uint64_t seed,
                                        bool symmetrize = false);

/// How theta* sits in the eigenbasis: uniformly over the top k directions,
/// over the bottom k, or with coordinates proportional to mu_i^p.
struct Alignment {
  enum class Kind { Head, Tail, Weighted };
  Kind kind = Kind::Head;
  std::size_t k = 1;
  double p = 0.0;

  static Alignment head(std::size_t k) { return {Kind::Head, k, 0.0}; }
  static Alignment tail(std::size_t k) { return {Kind::Tail, k, 0.0}; }
  static Alignment weighted(double p) { return {Kind::Weighted, 0, p}; }
};

std::string_view to_string(Alignment::Kind kind) noexcept;
Alignment::Kind parse_alignment_kind(std::string_view name);

/// ceil(d / 10), the head/tail width used when none is configured.
std::size_t default_alignment_width(std::size_t d) noexcept;

struct GroundTruth {
  Vector theta_star;  // unit norm
  Alignment alignment;
  Vector coords;  // V^T theta*
};

GroundTruth make_ground_truth(const SpectralDecomposition& spec, const Alignment& alignment);

/// y_i = ReLU(m_i^T theta*) + eps_i, eps_i ~ N(0, sigma^2) from Rng(seed).
Vector generate_responses(const AggregationDataset& ds, const GroundTruth& gt,
                          std::uint64_t seed);

// Dataset export: CSV with columns m1..md,y (one row per sample) and a
// JSON sidecar {n, d, L, sigma, seed, mode}.
std::string dataset_to_csv(const AggregationDataset& ds, const Vector& y);
std::string dataset_sidecar_json(const AggregationDataset& ds, std::uint64_t seed,
                                 const Alignment& alignment);

}  // namespace gnnrisk
