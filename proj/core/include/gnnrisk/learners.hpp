#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "gnnrisk/synthesis.hpp"
#include "gnnrisk/types.hpp"

namespace gnnrisk {

enum class Sampling { WithReplacement, OnePass };

std::string_view to_string(Sampling sampling) noexcept;
Sampling parse_sampling(std::string_view name);

struct SgdConfig {
  double gamma = 0.0;
  std::size_t iterations = 0;  // N, even and >= 2
  Sampling sampling = Sampling::WithReplacement;
  std::uint64_t seed = 0;
  /// Reject gamma > 1 / tr(M^) instead of running anyway.
  bool enforce_stepsize_condition = false;
};

struct RidgeConfig {
  double lambda = 0.0;
};

enum class Algorithm { Sgd, Ridge, Ols };

std::string_view to_string(Algorithm algorithm) noexcept;

struct Estimator {
  Vector theta;
  Algorithm algorithm = Algorithm::Sgd;
  double hyperparameter = 0.0;  // gamma for SGD, lambda for Ridge/OLS
  std::size_t iterate_count = 0;  // SGD steps, or rows for the closed forms
  Sampling sampling = Sampling::WithReplacement;
  std::uint64_t seed = 0;
};

/// Constant-stepsize SGD on the ReLU readout from theta_0 = 0:
///
///   theta_{t+1} = theta_t - gamma * (ReLU(m_t^T theta_t) - y_t) * m_t
///
/// returning the tail average (2/N) * sum_{t=N/2}^{N-1} theta_t. Rows are
/// drawn uniformly with replacement, or (one_pass) as the first N entries of
/// a seeded permutation, which needs N <= n.
Estimator sgd_tail_averaged(const AggregationDataset& ds, const Vector& y, const SgdConfig& cfg);

/// Solves (D^T D + lambda I) theta = D^T y by Cholesky. For lambda = 0 the
/// Gram matrix must have condition number below 1e12, otherwise
/// singular-system. The residual is checked against 1e-8 * ||D^T y||.
Estimator ridge_fit(const AggregationDataset& ds, const Vector& y, const RidgeConfig& cfg);

/// ridge_fit with lambda = 0, tagged as OLS.
Estimator ols_fit(const AggregationDataset& ds, const Vector& y);

inline constexpr double kMaxGramCondition = 1e12;
inline constexpr double kRidgeResidualTolerance = 1e-8;

/// {"algorithm": ..., "config": {...}, "theta": [...]}
std::string estimator_to_json(const Estimator& est);

}  // namespace gnnrisk
