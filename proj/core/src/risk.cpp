#include "gnnrisk/risk.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"
#include "gnnrisk/rng.hpp"

namespace gnnrisk {

namespace {

void check_dims(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds,
                const char* who) {
  require(static_cast<std::size_t>(theta.size()) == ds.dim() &&
              static_cast<std::size_t>(gt.theta_star.size()) == ds.dim(),
          ErrorKind::DimensionMismatch,
          std::string(who) + ": theta (" + std::to_string(theta.size()) + "), theta* (" +
              std::to_string(gt.theta_star.size()) + ") and dataset (" +
              std::to_string(ds.dim()) + ") dimensions differ");
}

}  // namespace

double excess_risk(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds) {
  check_dims(theta, gt, ds, "excess_risk");
  const Vector fitted = ds.samples * theta;
  const Vector truth = ds.samples * gt.theta_star;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < fitted.size(); ++i) {
    const double diff = relu(fitted[i]) - relu(truth[i]);
    sum += diff * diff;
  }
  return sum / (2.0 * static_cast<double>(ds.rows()));
}

double quadratic_proxy(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds) {
  check_dims(theta, gt, ds, "quadratic_proxy");
  const Vector diff = theta - gt.theta_star;
  return std::max(0.0, diff.dot(ds.covariance * diff));
}

WeightedNorms weighted_norms(const Vector& theta, const SpectralDecomposition& spec,
                             std::size_t k) {
  require(static_cast<std::size_t>(theta.size()) == spec.dim(), ErrorKind::DimensionMismatch,
          "weighted_norms: theta has " + std::to_string(theta.size()) + " entries, spectrum " +
              std::to_string(spec.dim()));
  require(k <= spec.dim(), ErrorKind::InvalidParameter,
          "weighted_norms: k = " + std::to_string(k) + " exceeds d = " +
              std::to_string(spec.dim()));
  const Vector coords = spec.coordinates(theta);
  WeightedNorms out;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double mu = spec.eigenvalues[idx];
    const double c2 = coords[idx] * coords[idx];
    if (i < k) {
      require(mu > 0.0, ErrorKind::InvalidParameter,
              "weighted_norms: mu_" + std::to_string(i + 1) + " = " + format_double(mu) +
                  " is not positive inside the head");
      out.head += c2 / mu;
    } else {
      out.tail += mu * c2;
    }
  }
  return out;
}

BiasVariance bias_variance_split(const Trainer& trainer, const AggregationDataset& ds,
                                 const GroundTruth& gt, std::size_t repeats, std::uint64_t seed,
                                 unsigned jobs) {
  require(repeats >= 2, ErrorKind::InvalidParameter,
          "bias_variance_split: need at least 2 repeats");
  std::vector<Vector> thetas(repeats);
  std::vector<std::exception_ptr> errors(repeats);

  auto run_one = [&](std::size_t r) {
    try {
      thetas[r] = trainer(derive_seed(seed, r)).theta;
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(repeats)));
  if (workers == 1) {
    for (std::size_t r = 0; r < repeats; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < repeats; r = next++) run_one(r);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Vector mean = Vector::Zero(static_cast<Eigen::Index>(ds.dim()));
  for (const auto& t : thetas) {
    check_dims(t, gt, ds, "bias_variance_split");
    mean += t;
  }
  mean /= static_cast<double>(repeats);

  BiasVariance out;
  const Vector bias_dir = mean - gt.theta_star;
  out.bias = std::max(0.0, bias_dir.dot(ds.covariance * bias_dir));
  for (const auto& t : thetas) {
    const Vector dev = t - mean;
    out.variance += std::max(0.0, dev.dot(ds.covariance * dev));
  }
  out.variance /= static_cast<double>(repeats);
  return out;
}

RiskReport risk_report(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds,
                       std::size_t k) {
  RiskReport report;
  report.delta = excess_risk(theta, gt, ds);
  report.proxy = quadratic_proxy(theta, gt, ds);
  report.k = k;
  if (ds.has_spectral()) {
    const WeightedNorms norms = weighted_norms(theta - gt.theta_star, ds.spectral, k);
    report.head_norm = norms.head;
    report.tail_norm = norms.tail;
  }
  return report;
}

std::string risk_report_csv(const RiskReport& report) {
  CsvWriter csv{"delta", "proxy", "bias_hat", "var_hat", "k", "head_norm", "tail_norm"};
  csv.field(report.delta)
      .field(report.proxy)
      .field(report.bias_hat)
      .field(report.var_hat)
      .field(report.k)
      .field(report.head_norm)
      .field(report.tail_norm);
  csv.end_row();
  return csv.str();
}

}  // namespace gnnrisk
