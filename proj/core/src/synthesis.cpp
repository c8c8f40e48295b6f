#include "gnnrisk/synthesis.hpp"

#include <cmath>

#include <json.hpp>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"
#include "gnnrisk/rng.hpp"

namespace gnnrisk {

FeatureMatrix sample_features(std::size_t n, std::size_t d, std::uint64_t seed) {
  require(n >= 1 && d >= 1, ErrorKind::InvalidParameter, "sample_features: need n, d >= 1");
  FeatureMatrix x{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)), seed};
  Rng rng(seed);
  for (Eigen::Index i = 0; i < x.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.values.cols(); ++j) x.values(i, j) = rng.normal();
  }
  return x;
}

AggregationDataset AggregationDataset::from_samples(Matrix samples, double noise_sigma,
                                                    int layers, bool symmetrized,
                                                    bool decompose) {
  require(samples.rows() >= 1 && samples.cols() >= 1, ErrorKind::InvalidParameter,
          "dataset: need at least one row and one column");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, ErrorKind::InvalidParameter,
          "dataset: noise sigma must be >= 0");
  AggregationDataset ds;
  ds.covariance = samples.transpose() * samples / static_cast<double>(samples.rows());
  ds.covariance = 0.5 * (ds.covariance + ds.covariance.transpose()).eval();
  ds.samples = std::move(samples);
  ds.noise_sigma = noise_sigma;
  ds.layers = layers;
  ds.symmetrized = symmetrized;
  if (decompose) ds.spectral = eigh_symmetric(ds.covariance);
  return ds;
}

AggregationDataset AggregationDataset::subset(std::span<const std::size_t> rows,
                                              bool decompose) const {
  require(!rows.empty(), ErrorKind::InvalidParameter, "dataset subset: no rows selected");
  Matrix picked(static_cast<Eigen::Index>(rows.size()), samples.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < this->rows(), ErrorKind::InvalidParameter,
            "dataset subset: row index out of range");
    picked.row(static_cast<Eigen::Index>(i)) = samples.row(static_cast<Eigen::Index>(rows[i]));
  }
  return from_samples(std::move(picked), noise_sigma, layers, false, decompose);
}

AggregationDataset aggregate(const GraphOperator& op, const FeatureMatrix& x, int layers,
                             double noise_sigma) {
  require(op.matrix.rows() == x.values.rows(), ErrorKind::DimensionMismatch,
          "aggregate: operator is " + std::to_string(op.matrix.rows()) + "x" +
              std::to_string(op.matrix.cols()) + " but features have " +
              std::to_string(x.values.rows()) + " rows");
  require(layers >= 1, ErrorKind::InvalidParameter, "aggregate: layer count must be >= 1");
  Matrix d = x.values;
  for (int l = 0; l < layers; ++l) d = op.matrix * d;
  return AggregationDataset::from_samples(std::move(d), noise_sigma, layers);
}

AggregationDataset sample_from_spectrum(const SpectralDecomposition& spec, std::size_t n,
                                        double noise_sigma, std::uint64_t seed,
                                        bool symmetrize) {
  require(n >= 1, ErrorKind::InvalidParameter, "sample_from_spectrum: n must be >= 1");
  require(spec.dim() >= 1 && spec.eigenvectors.rows() == spec.eigenvectors.cols() &&
              static_cast<std::size_t>(spec.eigenvectors.cols()) == spec.dim(),
          ErrorKind::DimensionMismatch, "sample_from_spectrum: malformed decomposition");
  for (double mu : spec.eigenvalues) {
    require(mu >= 0.0, ErrorKind::InvalidParameter,
            "sample_from_spectrum: negative spectrum value " + format_double(mu));
  }
  const auto d = static_cast<Eigen::Index>(spec.dim());
  const Matrix factor = spec.eigenvectors * spec.eigenvalues.cwiseSqrt().asDiagonal();

  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(symmetrize ? 2 * n : n);
  Matrix z(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.normal();
  }
  Matrix samples(rows, d);
  samples.topRows(z.rows()) = z * factor.transpose();
  if (symmetrize) samples.bottomRows(z.rows()) = -samples.topRows(z.rows());
  return AggregationDataset::from_samples(std::move(samples), noise_sigma, 1, symmetrize);
}

AggregationDataset sample_from_spectrum(const DecaySpectrum& spec, std::size_t n,
                                        double noise_sigma, std::uint64_t seed,
                                        bool symmetrize) {
  return sample_from_spectrum(spec.as_decomposition(), n, noise_sigma, seed, symmetrize);
}

std::string_view to_string(Alignment::Kind kind) noexcept {
  switch (kind) {
    case Alignment::Kind::Head: return "head";
    case Alignment::Kind::Tail: return "tail";
    case Alignment::Kind::Weighted: return "weighted";
  }
  return "unknown";
}

Alignment::Kind parse_alignment_kind(std::string_view name) {
  if (name == "head") return Alignment::Kind::Head;
  if (name == "tail") return Alignment::Kind::Tail;
  if (name == "weighted") return Alignment::Kind::Weighted;
  fail(ErrorKind::InvalidParameter,
       "unknown alignment '" + std::string(name) + "' (expected head, tail or weighted)");
}

std::size_t default_alignment_width(std::size_t d) noexcept { return (d + 9) / 10; }

GroundTruth make_ground_truth(const SpectralDecomposition& spec, const Alignment& alignment) {
  const std::size_t d = spec.dim();
  require(d >= 1, ErrorKind::InvalidParameter, "make_ground_truth: empty spectrum");
  Vector coords = Vector::Zero(static_cast<Eigen::Index>(d));

  switch (alignment.kind) {
    case Alignment::Kind::Head:
    case Alignment::Kind::Tail: {
      const std::size_t k = alignment.k;
      require(k >= 1 && k <= d, ErrorKind::InvalidParameter,
              "make_ground_truth: k = " + std::to_string(k) + " outside [1, " +
                  std::to_string(d) + "]");
      const std::size_t first = alignment.kind == Alignment::Kind::Head ? 0 : d - k;
      coords.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(k))
          .setConstant(1.0 / std::sqrt(static_cast<double>(k)));
      break;
    }
    case Alignment::Kind::Weighted: {
      require(std::isfinite(alignment.p), ErrorKind::InvalidParameter,
              "make_ground_truth: weight exponent must be finite");
      for (Eigen::Index i = 0; i < coords.size(); ++i) {
        coords[i] = std::pow(spec.eigenvalues[i], alignment.p);
      }
      require(coords.allFinite() && coords.norm() > 0.0, ErrorKind::InvalidParameter,
              "make_ground_truth: mu^p is not finite and non-zero for this spectrum");
      coords /= coords.norm();
      break;
    }
  }
  GroundTruth gt;
  gt.theta_star = spec.eigenvectors * coords;
  // Renormalize in the original basis; V is orthonormal only to rounding.
  gt.theta_star /= gt.theta_star.norm();
  gt.coords = spec.eigenvectors.transpose() * gt.theta_star;
  gt.alignment = alignment;
  return gt;
}

Vector generate_responses(const AggregationDataset& ds, const GroundTruth& gt,
                          std::uint64_t seed) {
  require(static_cast<std::size_t>(gt.theta_star.size()) == ds.dim(),
          ErrorKind::DimensionMismatch,
          "generate_responses: theta* has " + std::to_string(gt.theta_star.size()) +
              " entries, dataset has d = " + std::to_string(ds.dim()));
  Rng rng(seed);
  Vector y = ds.samples * gt.theta_star;
  for (auto& v : y) v = relu(v) + ds.noise_sigma * rng.normal();
  return y;
}

std::string dataset_to_csv(const AggregationDataset& ds, const Vector& y) {
  require(static_cast<std::size_t>(y.size()) == ds.rows(), ErrorKind::DimensionMismatch,
          "dataset_to_csv: response count differs from row count");
  std::vector<std::string> header;
  for (std::size_t j = 1; j <= ds.dim(); ++j) header.push_back("m" + std::to_string(j));
  header.emplace_back("y");
  CsvWriter csv(header);
  for (Eigen::Index i = 0; i < ds.samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.samples.cols(); ++j) csv.field(ds.samples(i, j));
    csv.field(y[i]);
    csv.end_row();
  }
  return csv.str();
}

std::string dataset_sidecar_json(const AggregationDataset& ds, std::uint64_t seed,
                                 const Alignment& alignment) {
  nlohmann::ordered_json out;
  out["n"] = ds.rows();
  out["d"] = ds.dim();
  out["L"] = ds.layers;
  out["sigma"] = ds.noise_sigma;
  out["seed"] = seed;
  out["mode"] = std::string(to_string(alignment.kind));
  if (alignment.kind == Alignment::Kind::Weighted) {
    out["p"] = alignment.p;
  } else {
    out["k"] = alignment.k;
  }
  out["symmetrized"] = ds.symmetrized;
  return out.dump(2) + "\n";
}

}  // namespace gnnrisk
