#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "gnnrisk/learners.hpp"
#include "gnnrisk/synthesis.hpp"

namespace gnnrisk {

/// Excess risk over the dataset rows, which stand in for the population:
///
///   Delta(theta) = 1/(2n) * sum_i (ReLU(m_i^T theta) - ReLU(m_i^T theta*))^2
///
/// The noise cross-term of L(theta) - L(theta*) has zero mean and is dropped.
double excess_risk(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds);

/// (theta - theta*)^T M^ (theta - theta*). Bounds Delta from above by a
/// factor 1/2 on every dataset, and from below by 1/8 on symmetrized ones.
double quadratic_proxy(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds);

struct WeightedNorms {
  double head = 0.0;  // sum_{i <= k} (v_i^T theta)^2 / mu_i
  double tail = 0.0;  // sum_{i > k} mu_i (v_i^T theta)^2
};

WeightedNorms weighted_norms(const Vector& theta, const SpectralDecomposition& spec,
                             std::size_t k);

struct BiasVariance {
  double bias = 0.0;
  double variance = 0.0;
};

/// Trains one estimator per repeat; the argument is that repeat's seed.
using Trainer = std::function<Estimator(std::uint64_t)>;

/// bias = ||mean_r theta_r - theta*||^2_M^, variance = mean_r ||theta_r -
/// mean||^2_M^. Repeat r gets seed derive_seed(seed, r). With jobs > 1 the
/// repeats run on worker threads; results do not depend on jobs.
BiasVariance bias_variance_split(const Trainer& trainer, const AggregationDataset& ds,
                                 const GroundTruth& gt, std::size_t repeats, std::uint64_t seed,
                                 unsigned jobs = 1);

struct RiskReport {
  double delta = 0.0;
  double proxy = 0.0;
  double bias_hat = 0.0;
  double var_hat = 0.0;
  std::size_t k = 0;
  double head_norm = 0.0;
  double tail_norm = 0.0;
};

/// Delta, proxy and the weighted norms of theta - theta*; bias and variance
/// are left for the caller to fill in.
RiskReport risk_report(const Vector& theta, const GroundTruth& gt, const AggregationDataset& ds,
                       std::size_t k);

/// Header "delta,proxy,bias_hat,var_hat,k,head_norm,tail_norm" and one row.
std::string risk_report_csv(const RiskReport& report);

}  // namespace gnnrisk
