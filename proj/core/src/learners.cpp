#include "gnnrisk/learners.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"
#include "gnnrisk/rng.hpp"

namespace gnnrisk {

std::string_view to_string(Sampling sampling) noexcept {
  return sampling == Sampling::OnePass ? "one_pass" : "with_replacement";
}

Sampling parse_sampling(std::string_view name) {
  if (name == "with_replacement") return Sampling::WithReplacement;
  if (name == "one_pass") return Sampling::OnePass;
  fail(ErrorKind::InvalidParameter,
       "unknown sampling '" + std::string(name) + "' (expected with_replacement or one_pass)");
}

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::Sgd: return "sgd";
    case Algorithm::Ridge: return "ridge";
    case Algorithm::Ols: return "ols";
  }
  return "unknown";
}

namespace {

void check_responses(const AggregationDataset& ds, const Vector& y, const char* who) {
  require(static_cast<std::size_t>(y.size()) == ds.rows(), ErrorKind::DimensionMismatch,
          std::string(who) + ": " + std::to_string(y.size()) + " responses for " +
              std::to_string(ds.rows()) + " rows");
  require(y.allFinite(), ErrorKind::InvalidParameter, std::string(who) + ": non-finite response");
}

}  // namespace

Estimator sgd_tail_averaged(const AggregationDataset& ds, const Vector& y, const SgdConfig& cfg) {
  check_responses(ds, y, "sgd");
  const std::size_t n_iter = cfg.iterations;
  require(n_iter >= 2 && n_iter % 2 == 0, ErrorKind::InvalidParameter,
          "sgd: iteration count must be even and >= 2 (got " + std::to_string(n_iter) + ")");
  require(std::isfinite(cfg.gamma) && cfg.gamma >= 0.0, ErrorKind::InvalidParameter,
          "sgd: stepsize must be >= 0 (got " + format_double(cfg.gamma) + ")");
  require(cfg.sampling != Sampling::OnePass || n_iter <= ds.rows(), ErrorKind::InvalidParameter,
          "sgd: one_pass needs N <= n (N = " + std::to_string(n_iter) +
              ", n = " + std::to_string(ds.rows()) + ")");
  if (cfg.enforce_stepsize_condition) {
    const double limit = 1.0 / ds.covariance_trace();
    require(cfg.gamma <= limit, ErrorKind::InvalidParameter,
            "sgd: stepsize " + format_double(cfg.gamma) + " exceeds 1/tr(M) = " +
                format_double(limit));
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order;
  if (cfg.sampling == Sampling::OnePass) {
    order.resize(ds.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
  }

  const auto d = static_cast<Eigen::Index>(ds.dim());
  Vector theta = Vector::Zero(d);
  Vector tail_sum = Vector::Zero(d);
  const std::size_t tail_start = n_iter / 2;
  for (std::size_t t = 0; t < n_iter; ++t) {
    if (t >= tail_start) tail_sum += theta;
    if (t + 1 == n_iter) break;  // theta_N is outside the averaging window
    const std::size_t row =
        cfg.sampling == Sampling::OnePass ? order[t] : static_cast<std::size_t>(rng.below(ds.rows()));
    const auto m = ds.samples.row(static_cast<Eigen::Index>(row));
    const double residual = relu(m.dot(theta)) - y[static_cast<Eigen::Index>(row)];
    theta.noalias() -= (cfg.gamma * residual) * m.transpose();
  }

  Estimator est;
  est.theta = tail_sum * (2.0 / static_cast<double>(n_iter));
  require(est.theta.allFinite(), ErrorKind::InvalidParameter,
          "sgd: iterates diverged (stepsize " + format_double(cfg.gamma) + " too large)");
  est.algorithm = Algorithm::Sgd;
  est.hyperparameter = cfg.gamma;
  est.iterate_count = n_iter;
  est.sampling = cfg.sampling;
  est.seed = cfg.seed;
  return est;
}

Estimator ridge_fit(const AggregationDataset& ds, const Vector& y, const RidgeConfig& cfg) {
  check_responses(ds, y, "ridge");
  require(std::isfinite(cfg.lambda) && cfg.lambda >= 0.0, ErrorKind::InvalidParameter,
          "ridge: lambda must be >= 0 (got " + format_double(cfg.lambda) + ")");
  Matrix gram = ds.samples.transpose() * ds.samples;
  gram.diagonal().array() += cfg.lambda;
  const Vector rhs = ds.samples.transpose() * y;

  if (cfg.lambda == 0.0) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    require(lo > 0.0 && hi / lo < kMaxGramCondition, ErrorKind::SingularSystem,
            "ridge: D^T D is singular or ill-conditioned (condition " +
                (lo > 0.0 ? format_double(hi / lo) : std::string("inf")) + ")");
  }

  const Eigen::LLT<Matrix> chol(gram);
  require(chol.info() == Eigen::Success, ErrorKind::SingularSystem,
          "ridge: Cholesky factorization failed");
  Vector theta = chol.solve(rhs);
  const double residual = (gram * theta - rhs).norm();
  require(theta.allFinite() && residual <= kRidgeResidualTolerance * rhs.norm(),
          ErrorKind::SingularSystem,
          "ridge: residual " + format_double(residual) + " exceeds tolerance");

  Estimator est;
  est.theta = std::move(theta);
  est.algorithm = Algorithm::Ridge;
  est.hyperparameter = cfg.lambda;
  est.iterate_count = ds.rows();
  return est;
}

Estimator ols_fit(const AggregationDataset& ds, const Vector& y) {
  Estimator est = ridge_fit(ds, y, RidgeConfig{0.0});
  est.algorithm = Algorithm::Ols;
  return est;
}

std::string estimator_to_json(const Estimator& est) {
  nlohmann::ordered_json out;
  out["algorithm"] = std::string(to_string(est.algorithm));
  nlohmann::ordered_json config;
  if (est.algorithm == Algorithm::Sgd) {
    config["gamma"] = est.hyperparameter;
    config["iterations"] = est.iterate_count;
    config["sampling"] = std::string(to_string(est.sampling));
    config["seed"] = est.seed;
  } else {
    config["lambda"] = est.hyperparameter;
    config["rows"] = est.iterate_count;
  }
  out["config"] = std::move(config);
  out["theta"] = std::vector<double>(est.theta.begin(), est.theta.end());
  return out.dump(2) + "\n";
}

}  // namespace gnnrisk
