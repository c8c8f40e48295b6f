#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gnnrisk {

// Closed-form excess-risk bounds for tail-averaged SGD and Ridge, evaluated
// in the eigenbasis of M: `mu` is the non-increasing spectrum and `coords`
// holds theta* in that basis. Absolute constants hidden in the inequalities
// are not recoverable, so these are shapes, not predictions.

enum class BoundSide { Upper, Lower };
enum class BoundAlgorithm { Sgd, Ridge };

std::string_view to_string(BoundSide side) noexcept;
std::string_view to_string(BoundAlgorithm algorithm) noexcept;

struct CutoffIndices {
  std::size_t k_star = 0;
  std::size_t k_dagger = 0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  double lambda_hat = 0.0;
  double b = 0.0;
};

struct BoundProfile {
  double bias = 0.0;
  double variance = 0.0;
  BoundSide side = BoundSide::Upper;
  BoundAlgorithm algorithm = BoundAlgorithm::Sgd;
  CutoffIndices cutoffs;
  /// Contribution of each eigen-coordinate to `bias`; sums to bias.
  std::vector<double> bias_terms;

  double total() const noexcept { return bias + variance; }
};

struct SgdCutoffs {
  std::size_t k_star = 0;    // max{k : mu_k >= 1/(N gamma)}
  std::size_t k_dagger = 0;  // max{k : mu_k >= 2/(3 N gamma)}
};

SgdCutoffs sgd_cutoffs(std::span<const double> mu, std::size_t n_samples, double gamma);

struct SgdBoundOptions {
  std::size_t k1 = 0;  // upper side only
  std::size_t k2 = 0;  // upper side only
  /// Reject gamma > 1/tr(M) (upper) or gamma > 1/mu_1 (lower).
  bool enforce_stepsize_condition = true;
};

/// Upper:
///   bias = 1/(gamma^2 N^2) sum_{i<=k1} exp(-2 N gamma mu_i) c_i^2 / mu_i
///          + sum_{i>k1} mu_i c_i^2
///   variance = (sigma^2 + ||theta*||_M^2)/N * (k2 + N^2 gamma^2 sum_{i>k2} mu_i^2)
/// Lower: the same bias at k*, and
///   variance = sigma^2/N * (k* + N^2 gamma^2 sum_{i>k*} mu_i^2)
///              + ||theta*||_M^2 (gamma/mu_1) sum_{i>k+} mu_i^2
BoundProfile sgd_risk_bound(std::span<const double> mu, std::span<const double> coords,
                            std::size_t n_samples, double gamma, double sigma, BoundSide side,
                            const SgdBoundOptions& options = {});

inline constexpr double kDefaultRidgeB = 2.0;

struct RidgeCutoff {
  std::size_t k_star = 0;
  double lambda_hat = 0.0;
};

/// k* = min{k : b mu_{k+1} <= (lambda + sum_{i>k} mu_i) / N}, mu_{d+1} = 0,
/// and lambda_hat = lambda + sum_{i>k*} mu_i.
RidgeCutoff ridge_cutoff(std::span<const double> mu, std::size_t n_samples, double lambda,
                         double b = kDefaultRidgeB);

/// bias = lambda_hat^2/N^2 sum_{i<=k} c_i^2/mu_i + sum_{i>k} mu_i c_i^2,
/// variance = sigma^2 (k/N + N/lambda_hat^2 sum_{i>k} mu_i^2).
/// The lower side ignores `k` and uses k*.
BoundProfile ridge_risk_bound(std::span<const double> mu, std::span<const double> coords,
                              std::size_t n_samples, double lambda, double sigma, BoundSide side,
                              std::size_t k, double b = kDefaultRidgeB);

/// Header "algorithm,side,bias,variance,total,k_star,k_dagger,lambda_hat".
std::vector<std::string> bound_profile_header();
std::string bound_profile_csv(std::span<const BoundProfile> profiles);

}  // namespace gnnrisk
