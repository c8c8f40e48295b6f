#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gnnrisk/bounds.hpp"
#include "gnnrisk/csv.hpp"
#include "support.hpp"

using namespace gnnrisk;

namespace {

using Values = std::vector<double>;

struct Fuzz {
  Values mu;
  Values coords;
  std::size_t n = 1;
  double gamma = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
};

Fuzz random_config(Rng& rng) {
  Fuzz f;
  const std::size_t d = 1 + rng.below(40);
  for (std::size_t i = 0; i < d; ++i) {
    f.mu.push_back(rng.uniform() < 0.1 ? 0.0 : std::exp(-6.0 * rng.uniform()));
    f.coords.push_back(rng.normal());
  }
  std::sort(f.mu.rbegin(), f.mu.rend());
  f.n = 1 + rng.below(5000);
  double trace = 0.0;
  for (double m : f.mu) trace += m;
  f.gamma = (0.001 + rng.uniform()) / std::max(trace, 1e-3) / 1.001;
  f.lambda = std::pow(10.0, -2.0 + 5.0 * rng.uniform());
  f.sigma = 2.0 * rng.uniform();
  return f;
}

void expect_sane(const BoundProfile& p) {
  ASSERT_TRUE(std::isfinite(p.bias) && std::isfinite(p.variance));
  ASSERT_GE(p.bias, 0.0);
  ASSERT_GE(p.variance, 0.0);
}

}  // namespace

TEST(SgdCutoffs, WorkedValues) {
  const Values mu{1, 0.5, 0.1, 0.01};
  const auto c = sgd_cutoffs(mu, 10, 0.2);
  EXPECT_EQ(c.k_star, 2u);
  EXPECT_EQ(c.k_dagger, 2u);
  EXPECT_EQ(sgd_cutoffs(mu, 1, 0.5).k_star, 0u);
  EXPECT_EQ(sgd_cutoffs(Values{1, 1, 1}, 4, 0.5).k_star, 3u);
  EXPECT_ERROR_KIND(sgd_cutoffs(mu, 10, 0.0), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(sgd_cutoffs(Values{0.1, 1.0}, 10, 0.1), ErrorKind::InvalidParameter);
}

TEST(SgdBound, NullProblem) {
  const Values mu{1, 0.5};
  const Values zero{0, 0};
  const auto p = sgd_risk_bound(mu, zero, 10, 0.1, 0.0, BoundSide::Upper, {1, 1});
  EXPECT_EQ(p.bias, 0.0);
  EXPECT_EQ(p.variance, 0.0);
  const auto q = sgd_risk_bound(mu, zero, 10, 0.1, 0.0, BoundSide::Lower);
  EXPECT_EQ(q.total(), 0.0);
}

TEST(SgdBound, OneDimensionalByHand) {
  const Values mu{1};
  const Values coords{1};
  const auto p = sgd_risk_bound(mu, coords, 4, 0.5, 1.0, BoundSide::Upper, {1, 1});
  EXPECT_NEAR(p.bias, 0.25 * std::exp(-4.0), 1e-12);
  EXPECT_NEAR(p.variance, 0.5, 1e-12);
  EXPECT_EQ(p.cutoffs.k1, 1u);
}

TEST(SgdBound, StepsizeConditions) {
  const Values mu{1, 1};
  const Values coords{1, 0};
  EXPECT_ERROR_KIND(sgd_risk_bound(mu, coords, 4, 0.6, 1.0, BoundSide::Upper, {1, 1}),
                    ErrorKind::InvalidParameter);
  EXPECT_NO_THROW(sgd_risk_bound(mu, coords, 4, 0.6, 1.0, BoundSide::Upper, {1, 1, false}));
  EXPECT_ERROR_KIND(sgd_risk_bound(mu, coords, 4, 1.5, 1.0, BoundSide::Lower),
                    ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(sgd_risk_bound(mu, coords, 4, 0.1, 1.0, BoundSide::Upper, {3, 0}),
                    ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(sgd_risk_bound(mu, Values{1}, 4, 0.1, 1.0, BoundSide::Upper),
                    ErrorKind::DimensionMismatch);
}

TEST(SgdBound, UpperBiasNonIncreasingInN) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Fuzz f = random_config(rng);
    double prev = INFINITY;
    for (std::size_t n : {10u, 40u, 160u, 640u, 2560u}) {
      const auto k = sgd_cutoffs(f.mu, n, f.gamma).k_star;
      const auto p = sgd_risk_bound(f.mu, f.coords, n, f.gamma, f.sigma, BoundSide::Upper,
                                    {k, k, false});
      // The head shrinks as N grows, so compare at a fixed head.
      const auto positive = static_cast<std::size_t>(
          std::count_if(f.mu.begin(), f.mu.end(), [](double m) { return m > 0.0; }));
      const auto fixed = sgd_risk_bound(f.mu, f.coords, n, f.gamma, f.sigma, BoundSide::Upper,
                                        {positive, positive, false});
      ASSERT_LE(fixed.bias, prev * (1 + 1e-12) + 1e-300);
      prev = fixed.bias;
      expect_sane(p);
    }
  }
}

TEST(RidgeCutoff, WorkedValues) {
  const auto a = ridge_cutoff(Values{1, 0.5, 0.25}, 4, 10.0);
  EXPECT_EQ(a.k_star, 0u);
  EXPECT_DOUBLE_EQ(a.lambda_hat, 11.75);
  const auto b = ridge_cutoff(Values{1, 1, 1, 1}, 1, 0.0);
  EXPECT_EQ(b.k_star, 0u);
  EXPECT_DOUBLE_EQ(b.lambda_hat, 4.0);
  const auto c = ridge_cutoff(Values{0, 0, 0}, 7, 3.0);
  EXPECT_EQ(c.k_star, 0u);
  EXPECT_EQ(c.lambda_hat, 3.0);
  EXPECT_ERROR_KIND(ridge_cutoff(Values{1}, 4, 1.0, 1.0), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(ridge_cutoff(Values{1}, 4, -1.0), ErrorKind::InvalidParameter);
}

TEST(RidgeCutoff, HeadShrinksAsLambdaGrows) {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Fuzz f = random_config(rng);
    std::size_t prev = f.mu.size() + 1;
    for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const auto k = ridge_cutoff(f.mu, f.n, lambda).k_star;
      ASSERT_LE(k, prev);
      prev = k;
    }
  }
}

TEST(RidgeBound, WorkedValues) {
  const Values mu{1};
  const Values coords{1};
  // With N = 2 the scan stops at k = 1, so lambda_hat = lambda.
  const auto p = ridge_risk_bound(mu, coords, 2, 2.0, 1.0, BoundSide::Upper, 1);
  EXPECT_DOUBLE_EQ(p.cutoffs.lambda_hat, 2.0);
  EXPECT_NEAR(p.bias, 1.0, 1e-12);
  EXPECT_NEAR(p.variance, 0.5, 1e-12);
  const Values zero{0};
  const auto q = ridge_risk_bound(mu, zero, 2, 2.0, 0.0, BoundSide::Upper, 1);
  EXPECT_EQ(q.bias, 0.0);
  EXPECT_EQ(q.variance, 0.0);
  EXPECT_ERROR_KIND(ridge_risk_bound(mu, coords, 2, 0.0, 1.0, BoundSide::Lower, 0),
                    ErrorKind::InvalidParameter);
}

TEST(Bounds, UpperDominatesLowerWhenHeadIsNonEmpty) {
  Rng rng(33);
  int checked = 0;
  while (checked < 50) {
    Fuzz f = random_config(rng);
    f.gamma = std::min(f.gamma, 1.0 / std::max(f.mu[0], 1e-9));
    const auto cut = sgd_cutoffs(f.mu, f.n, f.gamma);
    if (cut.k_star == 0 || f.mu[0] == 0.0) continue;  // upper >= lower needs a non-empty head
    const auto up = sgd_risk_bound(f.mu, f.coords, f.n, f.gamma, f.sigma, BoundSide::Upper,
                                   {cut.k_star, cut.k_star, false});
    const auto lo = sgd_risk_bound(f.mu, f.coords, f.n, f.gamma, f.sigma, BoundSide::Lower);
    ASSERT_GE(up.total(), lo.total() * (1 - 1e-12));

    const auto rc = ridge_cutoff(f.mu, f.n, f.lambda);
    const auto rup = ridge_risk_bound(f.mu, f.coords, f.n, f.lambda, f.sigma, BoundSide::Upper,
                                      rc.k_star);
    const auto rlo = ridge_risk_bound(f.mu, f.coords, f.n, f.lambda, f.sigma, BoundSide::Lower, 0);
    ASSERT_GE(rup.total(), rlo.total() * (1 - 1e-12));
    ++checked;
  }
}

TEST(Bounds, EmptyHeadCanInvertTheOrdering) {
  // N gamma mu_1 < 1 leaves k* = 0. Without the absolute constants the lower
  // formula's signal term then outgrows the upper one.
  const Values mu{1.0, 0.9};
  const Values coords{1.0, 1.0};
  const auto up = sgd_risk_bound(mu, coords, 2, 0.1, 0.0, BoundSide::Upper, {0, 0, false});
  const auto lo = sgd_risk_bound(mu, coords, 2, 0.1, 0.0, BoundSide::Lower);
  EXPECT_EQ(lo.cutoffs.k_star, 0u);
  EXPECT_LT(up.total(), lo.total());
}

TEST(Bounds, FiniteAndNonNegativeUnderFuzz) {
  Rng rng(34);
  for (int trial = 0; trial < 500; ++trial) {
    const Fuzz f = random_config(rng);
    const auto cut = sgd_cutoffs(f.mu, f.n, f.gamma);
    expect_sane(sgd_risk_bound(f.mu, f.coords, f.n, f.gamma, f.sigma, BoundSide::Upper,
                               {cut.k_star, cut.k_dagger, false}));
    if (f.mu[0] > 0.0 && f.gamma * f.mu[0] <= 1.0) {
      expect_sane(sgd_risk_bound(f.mu, f.coords, f.n, f.gamma, f.sigma, BoundSide::Lower));
    }
    const auto rc = ridge_cutoff(f.mu, f.n, f.lambda);
    expect_sane(ridge_risk_bound(f.mu, f.coords, f.n, f.lambda, f.sigma, BoundSide::Upper,
                                 rc.k_star));
    expect_sane(ridge_risk_bound(f.mu, f.coords, f.n, f.lambda, f.sigma, BoundSide::Lower, 0));
  }
}

TEST(Bounds, SgdHeadTermsNeverExceedRidge) {
  Rng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const Fuzz f = random_config(rng);
    const auto rc = ridge_cutoff(f.mu, f.n, f.lambda);
    if (rc.lambda_hat <= 0.0) continue;
    const double gamma = 1.0 / rc.lambda_hat;
    const std::size_t k = rc.k_star;
    const auto sgd = sgd_risk_bound(f.mu, f.coords, f.n, gamma, f.sigma, BoundSide::Upper,
                                    {k, k, false});
    const auto ridge = ridge_risk_bound(f.mu, f.coords, f.n, f.lambda, f.sigma, BoundSide::Upper, k);
    for (std::size_t i = 0; i < k; ++i) {
      ASSERT_LE(sgd.bias_terms[i], ridge.bias_terms[i] * (1 + 1e-12));
    }
  }
}

TEST(Bounds, CsvExport) {
  const Values mu{1};
  const Values coords{1};
  const BoundProfile profiles[] = {
      sgd_risk_bound(mu, coords, 4, 0.5, 1.0, BoundSide::Upper, {1, 1}),
      ridge_risk_bound(mu, coords, 2, 2.0, 1.0, BoundSide::Upper, 1)};
  const auto table = parse_csv(bound_profile_csv(profiles));
  EXPECT_EQ(table.header, bound_profile_header());
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0][0], "sgd");
  EXPECT_EQ(table.rows[0][7], "");
  EXPECT_EQ(table.rows[1][0], "ridge");
  EXPECT_EQ(table.rows[1][6], "");
  EXPECT_EQ(std::stod(table.rows[1][7]), 2.0);
}
