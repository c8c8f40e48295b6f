#include "gnnrisk/bounds.hpp"

#include <cmath>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"

namespace gnnrisk {

std::string_view to_string(BoundSide side) noexcept {
  return side == BoundSide::Upper ? "upper" : "lower";
}

std::string_view to_string(BoundAlgorithm algorithm) noexcept {
  return algorithm == BoundAlgorithm::Sgd ? "sgd" : "ridge";
}

namespace {

void check_spectrum(std::span<const double> mu, const char* who) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    require(std::isfinite(mu[i]) && mu[i] >= 0.0, ErrorKind::InvalidParameter,
            std::string(who) + ": spectrum entries must be finite and >= 0");
    require(i == 0 || mu[i] <= mu[i - 1], ErrorKind::InvalidParameter,
            std::string(who) + ": spectrum must be sorted non-increasing");
  }
}

void check_coords(std::span<const double> mu, std::span<const double> coords, const char* who) {
  require(coords.size() == mu.size(), ErrorKind::DimensionMismatch,
          std::string(who) + ": " + std::to_string(coords.size()) + " coordinates for " +
              std::to_string(mu.size()) + " eigenvalues");
  for (double c : coords) {
    require(std::isfinite(c), ErrorKind::InvalidParameter,
            std::string(who) + ": non-finite coordinate");
  }
}

double squared_tail_sum(std::span<const double> mu, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < mu.size(); ++i) s += mu[i] * mu[i];
  return s;
}

double m_norm_squared(std::span<const double> mu, std::span<const double> coords) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * coords[i] * coords[i];
  return s;
}

// c_i^2 / mu_i scaled by `head_weight(i)` for i < k, mu_i c_i^2 beyond.
template <typename HeadWeight>
std::vector<double> bias_terms(std::span<const double> mu, std::span<const double> coords,
                               std::size_t k, HeadWeight head_weight, const char* who) {
  std::vector<double> terms(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double c2 = coords[i] * coords[i];
    if (i < k) {
      if (c2 == 0.0) continue;
      require(mu[i] > 0.0, ErrorKind::InvalidParameter,
              std::string(who) + ": zero eigenvalue inside the head with non-zero theta*");
      terms[i] = head_weight(i) * c2 / mu[i];
    } else {
      terms[i] = mu[i] * c2;
    }
  }
  return terms;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void check_count(std::size_t n_samples, double sigma, const char* who) {
  require(n_samples >= 1, ErrorKind::InvalidParameter, std::string(who) + ": N must be >= 1");
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::InvalidParameter,
          std::string(who) + ": sigma must be >= 0");
}

}  // namespace

SgdCutoffs sgd_cutoffs(std::span<const double> mu, std::size_t n_samples, double gamma) {
  require(n_samples >= 1, ErrorKind::InvalidParameter, "sgd_cutoffs: N must be >= 1");
  require(std::isfinite(gamma) && gamma > 0.0, ErrorKind::InvalidParameter,
          "sgd_cutoffs: gamma must be > 0");
  check_spectrum(mu, "sgd_cutoffs");
  const double n_gamma = static_cast<double>(n_samples) * gamma;
  const double star_threshold = 1.0 / n_gamma;
  const double dagger_threshold = 2.0 / (3.0 * n_gamma);
  SgdCutoffs out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] >= star_threshold) out.k_star = i + 1;
    if (mu[i] >= dagger_threshold) out.k_dagger = i + 1;
  }
  return out;
}

BoundProfile sgd_risk_bound(std::span<const double> mu, std::span<const double> coords,
                            std::size_t n_samples, double gamma, double sigma, BoundSide side,
                            const SgdBoundOptions& options) {
  check_spectrum(mu, "sgd_risk_bound");
  check_coords(mu, coords, "sgd_risk_bound");
  check_count(n_samples, sigma, "sgd_risk_bound");
  require(std::isfinite(gamma) && gamma > 0.0, ErrorKind::InvalidParameter,
          "sgd_risk_bound: gamma must be > 0");

  const double n = static_cast<double>(n_samples);
  const double trace = [&] {
    double s = 0.0;
    for (double m : mu) s += m;
    return s;
  }();

  BoundProfile out;
  out.side = side;
  out.algorithm = BoundAlgorithm::Sgd;
  std::size_t k_bias = 0;
  std::size_t k_var = 0;
  if (side == BoundSide::Upper) {
    require(options.k1 <= mu.size() && options.k2 <= mu.size(), ErrorKind::InvalidParameter,
            "sgd_risk_bound: k1 and k2 must lie in [0, d]");
    if (options.enforce_stepsize_condition) {
      require(trace > 0.0 && gamma <= 1.0 / trace, ErrorKind::InvalidParameter,
              "sgd_risk_bound: upper bound needs gamma <= 1/tr(M)");
    }
    k_bias = options.k1;
    k_var = options.k2;
    const SgdCutoffs cut = sgd_cutoffs(mu, n_samples, gamma);
    out.cutoffs.k_star = cut.k_star;
    out.cutoffs.k_dagger = cut.k_dagger;
  } else {
    if (options.enforce_stepsize_condition) {
      require(!mu.empty() && mu[0] > 0.0 && gamma <= 1.0 / mu[0], ErrorKind::InvalidParameter,
              "sgd_risk_bound: lower bound needs gamma <= 1/mu_1");
    }
    const SgdCutoffs cut = sgd_cutoffs(mu, n_samples, gamma);
    out.cutoffs.k_star = cut.k_star;
    out.cutoffs.k_dagger = cut.k_dagger;
    k_bias = cut.k_star;
    k_var = cut.k_star;
  }
  out.cutoffs.k1 = k_bias;
  out.cutoffs.k2 = k_var;

  const double head_scale = 1.0 / (gamma * gamma * n * n);
  out.bias_terms = bias_terms(
      mu, coords, k_bias,
      [&](std::size_t i) { return head_scale * std::exp(-2.0 * n * gamma * mu[i]); },
      "sgd_risk_bound");
  out.bias = sum(out.bias_terms);

  const double signal = m_norm_squared(mu, coords);
  const double effective =
      static_cast<double>(k_var) + n * n * gamma * gamma * squared_tail_sum(mu, k_var);
  if (side == BoundSide::Upper) {
    out.variance = (sigma * sigma + signal) / n * effective;
  } else {
    out.variance = sigma * sigma / n * effective;
    const double tail = squared_tail_sum(mu, out.cutoffs.k_dagger);
    if (tail > 0.0 && signal > 0.0) out.variance += signal * (gamma / mu[0]) * tail;
  }
  return out;
}

RidgeCutoff ridge_cutoff(std::span<const double> mu, std::size_t n_samples, double lambda,
                         double b) {
  require(n_samples >= 1, ErrorKind::InvalidParameter, "ridge_cutoff: N must be >= 1");
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::InvalidParameter,
          "ridge_cutoff: lambda must be >= 0");
  require(std::isfinite(b) && b > 1.0, ErrorKind::InvalidParameter,
          "ridge_cutoff: b must be > 1");
  check_spectrum(mu, "ridge_cutoff");

  const std::size_t d = mu.size();
  std::vector<double> tail(d + 1, 0.0);  // tail[k] = sum_{i>k} mu_i (1-based i)
  for (std::size_t k = d; k-- > 0;) tail[k] = tail[k + 1] + mu[k];

  const double n = static_cast<double>(n_samples);
  RidgeCutoff out{d, lambda + tail[d]};
  for (std::size_t k = 0; k <= d; ++k) {
    const double next = k < d ? mu[k] : 0.0;  // mu_{k+1}
    if (b * next <= (lambda + tail[k]) / n) {
      out.k_star = k;
      out.lambda_hat = lambda + tail[k];
      break;
    }
  }
  return out;
}

BoundProfile ridge_risk_bound(std::span<const double> mu, std::span<const double> coords,
                              std::size_t n_samples, double lambda, double sigma, BoundSide side,
                              std::size_t k, double b) {
  check_spectrum(mu, "ridge_risk_bound");
  check_coords(mu, coords, "ridge_risk_bound");
  check_count(n_samples, sigma, "ridge_risk_bound");
  if (side == BoundSide::Lower) {
    require(lambda > 0.0, ErrorKind::InvalidParameter,
            "ridge_risk_bound: lower bound needs lambda > 0");
  } else {
    require(k <= mu.size(), ErrorKind::InvalidParameter,
            "ridge_risk_bound: k must lie in [0, d]");
  }
  const RidgeCutoff cut = ridge_cutoff(mu, n_samples, lambda, b);
  const std::size_t k_used = side == BoundSide::Lower ? cut.k_star : k;
  const double n = static_cast<double>(n_samples);
  const double lh = cut.lambda_hat;

  BoundProfile out;
  out.side = side;
  out.algorithm = BoundAlgorithm::Ridge;
  out.cutoffs.k_star = cut.k_star;
  out.cutoffs.k1 = k_used;
  out.cutoffs.k2 = k_used;
  out.cutoffs.lambda_hat = lh;
  out.cutoffs.b = b;

  const double head_scale = lh * lh / (n * n);
  out.bias_terms = bias_terms(
      mu, coords, k_used, [&](std::size_t) { return head_scale; }, "ridge_risk_bound");
  out.bias = sum(out.bias_terms);

  const double tail_sq = squared_tail_sum(mu, k_used);
  double spread = 0.0;
  if (tail_sq > 0.0) {
    require(lh > 0.0, ErrorKind::InvalidParameter,
            "ridge_risk_bound: lambda_hat is zero with a non-zero tail");
    spread = n / (lh * lh) * tail_sq;
  }
  out.variance = sigma * sigma * (static_cast<double>(k_used) / n + spread);
  return out;
}

std::vector<std::string> bound_profile_header() {
  return {"algorithm", "side", "bias", "variance", "total", "k_star", "k_dagger", "lambda_hat"};
}

std::string bound_profile_csv(std::span<const BoundProfile> profiles) {
  CsvWriter csv(bound_profile_header());
  for (const auto& p : profiles) {
    csv.field(to_string(p.algorithm))
        .field(to_string(p.side))
        .field(p.bias)
        .field(p.variance)
        .field(p.total())
        .field(p.cutoffs.k_star);
    if (p.algorithm == BoundAlgorithm::Sgd) {
      csv.field(p.cutoffs.k_dagger).empty_field();
    } else {
      csv.empty_field().field(p.cutoffs.lambda_hat);
    }
    csv.end_row();
  }
  return csv.str();
}

}  // namespace gnnrisk
