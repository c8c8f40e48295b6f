#include "gnnrisk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"

namespace gnnrisk {

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

Vector SpectralDecomposition::coordinates(const Vector& x) const {
  require(x.size() == eigenvectors.rows(), ErrorKind::DimensionMismatch,
          "coordinates: vector has " + std::to_string(x.size()) + " entries, basis has " +
              std::to_string(eigenvectors.rows()));
  return eigenvectors.transpose() * x;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const auto n = a.rows();
  for (Eigen::Index q = 1; q < n; ++q) {
    for (Eigen::Index p = 0; p < q; ++p) sum += a(p, q) * a(p, q);
  }
  return std::sqrt(2.0 * sum);
}

// Annihilates a(p, q) with one two-sided rotation and accumulates it in v.
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  // Smaller root of t^2 + 2 theta t - 1 = 0 keeps the rotation angle <= pi/4.
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const auto n = a.rows();
  double* col_p = a.col(p).data();
  double* col_q = a.col(q).data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = col_p[k];
    const double akq = col_q[k];
    col_p[k] = c * akp - s * akq;
    col_q[k] = s * akp + c * akq;
  }
  col_p[p] = app - t * apq;
  col_q[q] = aqq + t * apq;
  col_p[q] = 0.0;
  col_q[p] = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    a(p, k) = col_p[k];
    a(q, k) = col_q[k];
  }

  double* vp = v.col(p).data();
  double* vq = v.col(q).data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = vp[k];
    const double y = vq[k];
    vp[k] = c * x - s * y;
    vq[k] = s * x + c * y;
  }
}

void apply_sign_convention(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

SpectralDecomposition sorted(const Vector& values, const Matrix& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return values[x] > values[y]; });
  SpectralDecomposition out;
  out.eigenvalues.resize(values.size());
  out.eigenvectors.resize(vectors.rows(), vectors.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(i);
    out.eigenvalues[dst] = values[order[i]];
    out.eigenvectors.col(dst) = vectors.col(order[i]);
  }
  return out;
}

}  // namespace

SpectralDecomposition eigh_symmetric(const Matrix& input, const JacobiOptions& options) {
  require(input.rows() >= 1 && input.rows() == input.cols(), ErrorKind::DimensionMismatch,
          "eigh_symmetric: need a non-empty square matrix");
  require(input.allFinite(), ErrorKind::InvalidParameter, "eigh_symmetric: non-finite entry");
  const double scale = std::max(1.0, input.cwiseAbs().maxCoeff());
  const double asymmetry = (input - input.transpose()).cwiseAbs().maxCoeff();
  require(asymmetry <= options.symmetry_tolerance * scale, ErrorKind::NotSymmetric,
          "eigh_symmetric: max |a_ij - a_ji| = " + format_double(asymmetry));

  const auto n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double target = options.relative_tolerance * a.norm();

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off < target) break;
    // Threshold pass: early sweeps skip entries that are already small
    // relative to the remaining off-diagonal mass.
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) > threshold) rotate(a, v, p, q);
      }
    }
  }

  apply_sign_convention(v);
  return sorted(a.diagonal(), v);
}

SpectralDecomposition DecaySpectrum::as_decomposition() const {
  const auto d = static_cast<Eigen::Index>(dim);
  return SpectralDecomposition{values, Matrix::Identity(d, d)};
}

DecaySpectrum synthetic_spectrum(std::size_t d, double beta) {
  require(d >= 1, ErrorKind::InvalidParameter, "synthetic_spectrum: d must be >= 1");
  require(std::isfinite(beta) && beta >= 0.0, ErrorKind::InvalidParameter,
          "synthetic_spectrum: beta must be >= 0 (got " + format_double(beta) + ")");
  DecaySpectrum spec{d, beta, Vector(static_cast<Eigen::Index>(d))};
  for (std::size_t i = 1; i <= d; ++i) {
    spec.values[static_cast<Eigen::Index>(i - 1)] = std::pow(static_cast<double>(i), -beta);
  }
  return spec;
}

double fit_decay_rate(std::span<const double> values, std::size_t head) {
  const std::size_t count = std::min(head, values.size());
  require(count >= 2, ErrorKind::InvalidParameter,
          "fit_decay_rate: need at least two values in the head window");
  double mx = 0.0;
  double my = 0.0;
  std::vector<double> xs(count);
  std::vector<double> ys(count);
  for (std::size_t i = 0; i < count; ++i) {
    require(values[i] > 0.0, ErrorKind::InvalidParameter,
            "fit_decay_rate: value " + std::to_string(i + 1) + " is not positive (" +
                format_double(values[i]) + ")");
    xs[i] = std::log(static_cast<double>(i + 1));
    ys[i] = std::log(values[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return -sxy / sxx;
}

SpectralDecomposition stack_spectrum(const SpectralDecomposition& dec, int layers) {
  require(layers >= 1, ErrorKind::InvalidParameter,
          "stack_spectrum: layer count must be >= 1 (got " + std::to_string(layers) + ")");
  Vector powered = dec.eigenvalues;
  for (auto& mu : powered) mu = std::pow(mu, layers);
  return sorted(powered, dec.eigenvectors);
}

bool ratio_amplification_check(const SpectralDecomposition& dec, std::size_t i, std::size_t j,
                               int layers) {
  require(layers >= 1, ErrorKind::InvalidParameter,
          "ratio_amplification_check: layer count must be >= 1");
  require(i >= 1 && j >= 1 && i <= dec.dim() && j <= dec.dim(), ErrorKind::InvalidParameter,
          "ratio_amplification_check: index out of range");
  const double mu_i = dec.eigenvalues[static_cast<Eigen::Index>(i - 1)];
  const double mu_j = dec.eigenvalues[static_cast<Eigen::Index>(j - 1)];
  require(mu_i > 0.0 && mu_j > 0.0, ErrorKind::InvalidParameter,
          "ratio_amplification_check: eigenvalues must be positive");
  const double q = mu_i / mu_j;
  return std::pow(q, layers + 1) > std::pow(q, layers);
}

double coefficient_of_variation(std::span<const double> values, std::size_t head) {
  const std::size_t count = std::min(head, values.size());
  require(count >= 1, ErrorKind::InvalidParameter, "coefficient_of_variation: empty window");
  double mean = 0.0;
  for (std::size_t i = 0; i < count; ++i) mean += values[i];
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (std::size_t i = 0; i < count; ++i) var += (values[i] - mean) * (values[i] - mean);
  var /= static_cast<double>(count);
  require(mean != 0.0, ErrorKind::InvalidParameter, "coefficient_of_variation: zero mean");
  return std::sqrt(var) / std::abs(mean);
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorKind::DimensionMismatch,
          "spearman_correlation: need two equal-length samples of size >= 2");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  require(saa > 0.0 && sbb > 0.0, ErrorKind::InvalidParameter,
          "spearman_correlation: a sample is constant");
  return sab / std::sqrt(saa * sbb);
}

std::string spectrum_to_csv(std::span<const double> eigenvalues) {
  CsvWriter csv{"index", "eigenvalue"};
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    csv.field(i + 1).field(eigenvalues[i]);
    csv.end_row();
  }
  return csv.str();
}

std::string decomposition_to_json(const SpectralDecomposition& dec) {
  nlohmann::ordered_json out;
  out["eigenvalues"] = std::vector<double>(dec.eigenvalues.begin(), dec.eigenvalues.end());
  nlohmann::json vectors = nlohmann::json::array();
  for (Eigen::Index j = 0; j < dec.eigenvectors.cols(); ++j) {
    const Vector col = dec.eigenvectors.col(j);
    vectors.push_back(std::vector<double>(col.begin(), col.end()));
  }
  out["eigenvectors"] = std::move(vectors);
  return out.dump() + "\n";
}

}  // namespace gnnrisk
