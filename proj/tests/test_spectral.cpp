#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gnnrisk/graph.hpp"
#include "gnnrisk/spectral.hpp"
#include "gnnrisk/synthesis.hpp"
#include "support.hpp"

using namespace gnnrisk;
using gnnrisk::testing::random_symmetric;

namespace {

std::vector<double> to_vec(const Vector& v) { return {v.begin(), v.end()}; }

SpectralDecomposition diag_dec(std::vector<double> mu) {
  SpectralDecomposition dec;
  dec.eigenvalues = Eigen::Map<Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  dec.eigenvectors = Matrix::Identity(dec.eigenvalues.size(), dec.eigenvalues.size());
  return dec;
}

}  // namespace

TEST(Jacobi, IdentityHasUnitEigenvalues) {
  const auto dec = eigh_symmetric(Matrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(dec.eigenvalues[i], 1.0);
}

TEST(Jacobi, DiagonalInputKeepsCoordinateAxes) {
  Matrix a(2, 2);
  a << 2, 0, 0, 1;
  const auto dec = eigh_symmetric(a);
  EXPECT_EQ(dec.eigenvalues[0], 2.0);
  EXPECT_EQ(dec.eigenvalues[1], 1.0);
  EXPECT_EQ(dec.eigenvectors, Matrix::Identity(2, 2));
}

TEST(Jacobi, SwapMatrixByHand) {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const auto dec = eigh_symmetric(a);
  EXPECT_NEAR(dec.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(dec.eigenvalues[1], -1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(dec.eigenvectors(0, 0)), r, 1e-15);
  EXPECT_NEAR(dec.eigenvectors(0, 0), dec.eigenvectors(1, 0), 1e-15);
  EXPECT_NEAR(dec.eigenvectors(0, 1), -dec.eigenvectors(1, 1), 1e-15);
}

TEST(Jacobi, RejectsAsymmetricAndNonSquare) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_ERROR_KIND(eigh_symmetric(a), ErrorKind::NotSymmetric);
  EXPECT_ERROR_KIND(eigh_symmetric(Matrix::Zero(2, 3)), ErrorKind::DimensionMismatch);
}

TEST(Jacobi, ReconstructionAndOracleAgreementOnRandomMatrices) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = static_cast<Eigen::Index>(1 + rng.below(32));
    const Matrix a = random_symmetric(rng, d);
    const auto dec = eigh_symmetric(a);
    const double rel = (dec.reconstruct() - a).norm() / std::max(a.norm(), 1e-300);
    ASSERT_LT(rel, 1e-8) << "d=" << d;

    // Orthonormal eigenvectors.
    const Matrix gram = dec.eigenvectors.transpose() * dec.eigenvectors;
    ASSERT_LT((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);

    // Eigen's solver is an independent oracle for the values.
    Eigen::SelfAdjointEigenSolver<Matrix> oracle(a);
    const Vector expected = oracle.eigenvalues().reverse();
    ASSERT_LT((dec.eigenvalues - expected).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, a.norm()));

    for (Eigen::Index i = 1; i < d; ++i) ASSERT_GE(dec.eigenvalues[i - 1], dec.eigenvalues[i]);
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::Index arg = 0;
      dec.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
      ASSERT_GE(dec.eigenvectors(arg, j), 0.0);
    }
  }
}

TEST(Jacobi, PsdInputGivesNonNegativeValues) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = gnnrisk::testing::random_matrix(rng, 10, 6);
    const Matrix a = x.transpose() * x / 10.0;
    const auto dec = eigh_symmetric(0.5 * (a + a.transpose()));
    for (double mu : dec.eigenvalues) EXPECT_GE(mu, -1e-10);
  }
  // Rank-deficient PSD.
  Matrix r = Matrix::Ones(4, 4);
  for (double mu : eigh_symmetric(r).eigenvalues) EXPECT_GE(mu, -1e-10);
}

TEST(Jacobi, Deterministic) {
  Rng rng(1);
  const Matrix a = random_symmetric(rng, 12);
  const auto x = eigh_symmetric(a);
  const auto y = eigh_symmetric(a);
  EXPECT_EQ(x.eigenvalues, y.eigenvalues);
  EXPECT_EQ(x.eigenvectors, y.eigenvectors);
}

TEST(SyntheticSpectrum, WorkedValues) {
  const auto s1 = synthetic_spectrum(4, 1.0);
  EXPECT_EQ(to_vec(s1.values), (std::vector<double>{1.0, 0.5, 1.0 / 3.0, 0.25}));
  EXPECT_EQ(to_vec(synthetic_spectrum(3, 0.0).values), (std::vector<double>{1.0, 1.0, 1.0}));
  const auto s2 = synthetic_spectrum(3, 2.0);
  EXPECT_DOUBLE_EQ(s2.values[1], 0.25);
  EXPECT_DOUBLE_EQ(s2.values[2], 1.0 / 9.0);
  EXPECT_ERROR_KIND(synthetic_spectrum(3, -0.5), ErrorKind::InvalidParameter);
  const auto dec = s1.as_decomposition();
  EXPECT_EQ(dec.eigenvectors, Matrix::Identity(4, 4));
}

TEST(FitDecayRate, RecoversExponentExactly) {
  for (double beta : {0.0, 0.25, 1.0, 1.5, 2.0, 3.0}) {
    const auto s = synthetic_spectrum(50, beta);
    EXPECT_NEAR(fit_decay_rate(to_vec(s.values), 100), beta, 1e-9) << beta;
  }
  const std::vector<double> flat(10, 0.3);
  EXPECT_NEAR(fit_decay_rate(flat), 0.0, 1e-12);
}

TEST(FitDecayRate, HeadWindowAndErrors) {
  std::vector<double> v = to_vec(synthetic_spectrum(20, 2.0).values);
  v[15] = 0.0;  // outside a head of 10
  EXPECT_NEAR(fit_decay_rate(v, 10), 2.0, 1e-9);
  EXPECT_ERROR_KIND(fit_decay_rate(v, 20), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(fit_decay_rate(std::vector<double>{1.0}), ErrorKind::InvalidParameter);
}

TEST(FitDecayRate, BaDecaysFasterThanRegularOnShiftPsd) {
  const auto ba = eigh_symmetric(build_operator(generate_ba(500, 3, 0), OperatorKind::ShiftPsd).matrix);
  const auto reg =
      eigh_symmetric(build_operator(generate_regular(500, 6, 0), OperatorKind::ShiftPsd).matrix);
  const double b_ba = fit_decay_rate(to_vec(ba.eigenvalues), 100);
  const double b_reg = fit_decay_rate(to_vec(reg.eigenvalues), 100);
  EXPECT_GT(b_ba, b_reg);
}

TEST(StackSpectrum, WorkedValues) {
  const auto s = stack_spectrum(diag_dec({0.9, 0.3}), 2);
  EXPECT_NEAR(s.eigenvalues[0], 0.81, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 0.09, 1e-15);
  EXPECT_NEAR(s.eigenvalues[0] / s.eigenvalues[1], 9.0, 1e-12);
  const auto base = diag_dec({0.7, 0.2, 0.1});
  EXPECT_EQ(stack_spectrum(base, 1).eigenvalues, base.eigenvalues);
  const auto eq = stack_spectrum(diag_dec({0.5, 0.5}), 4);
  EXPECT_EQ(eq.eigenvalues[0] / eq.eigenvalues[1], 1.0);
  EXPECT_ERROR_KIND(stack_spectrum(base, 0), ErrorKind::InvalidParameter);
}

TEST(StackSpectrum, Composition) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> mu(8);
    for (double& m : mu) m = rng.uniform();
    std::sort(mu.rbegin(), mu.rend());
    const auto dec = diag_dec(mu);
    for (int a = 1; a <= 3; ++a) {
      for (int b = 1; b <= 3; ++b) {
        const auto lhs = stack_spectrum(dec, a * b);
        const auto rhs = stack_spectrum(stack_spectrum(dec, a), b);
        for (Eigen::Index i = 0; i < 8; ++i) {
          ASSERT_NEAR(lhs.eigenvalues[i], rhs.eigenvalues[i], 1e-12 * lhs.eigenvalues[i]);
        }
      }
    }
  }
}

TEST(StackSpectrum, NegativeValuesReorder) {
  // Even powers can reorder a signed spectrum; output stays sorted.
  const auto s = stack_spectrum(diag_dec({0.5, -0.9}), 2);
  EXPECT_NEAR(s.eigenvalues[0], 0.81, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 0.25, 1e-15);
}

TEST(RatioAmplification, WorkedCases) {
  EXPECT_TRUE(ratio_amplification_check(diag_dec({0.8, 0.2}), 1, 2, 1));
  EXPECT_FALSE(ratio_amplification_check(diag_dec({0.5, 0.5}), 1, 2, 3));
  const auto dec = diag_dec({0.9, 0.5, 0.1});
  for (std::size_t i = 1; i <= 3; ++i) {
    for (std::size_t j = 1; j <= 3; ++j) {
      for (int l = 1; l <= 5; ++l) {
        EXPECT_EQ(ratio_amplification_check(dec, i, j, l), i < j);
      }
    }
  }
  EXPECT_ERROR_KIND(ratio_amplification_check(diag_dec({0.5, 0.0}), 1, 2, 1),
                    ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(ratio_amplification_check(dec, 0, 2, 1), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(ratio_amplification_check(dec, 1, 2, 0), ErrorKind::InvalidParameter);
}

TEST(Dispersion, CoefficientOfVariationAndSpearman) {
  EXPECT_NEAR(coefficient_of_variation(std::vector<double>{1, 1, 1}, 3), 0.0, 1e-15);
  // Values 1 and 3: mean 2, population sd 1.
  EXPECT_NEAR(coefficient_of_variation(std::vector<double>{3, 1, 100}, 2), 0.5, 1e-15);
  EXPECT_NEAR(spearman_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}), 1.0, 1e-15);
  EXPECT_NEAR(spearman_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0, 1e-15);
}

TEST(Dispersion, RegularHeadIsFlatterThanBa) {
  const auto ba = eigh_symmetric(build_operator(generate_ba(500, 3, 1), OperatorKind::ShiftPsd).matrix);
  const auto reg =
      eigh_symmetric(build_operator(generate_regular(500, 6, 1), OperatorKind::ShiftPsd).matrix);
  EXPECT_LT(coefficient_of_variation(to_vec(reg.eigenvalues), 100),
            coefficient_of_variation(to_vec(ba.eigenvalues), 100));
}

TEST(SpectrumExport, CsvAndJson) {
  EXPECT_EQ(spectrum_to_csv(std::vector<double>{1.0, 0.5}), "index,eigenvalue\n1,1\n2,0.5\n");
  const auto json = decomposition_to_json(diag_dec({2.0, 1.0}));
  EXPECT_NE(json.find("\"eigenvalues\""), std::string::npos);
  EXPECT_NE(json.find("\"eigenvectors\""), std::string::npos);
}
