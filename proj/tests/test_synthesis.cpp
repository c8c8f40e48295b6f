#include <gtest/gtest.h>

#include <cmath>

#include "gnnrisk/graph.hpp"
#include "gnnrisk/spectral.hpp"
#include "gnnrisk/synthesis.hpp"
#include "support.hpp"

using namespace gnnrisk;

namespace {

SpectralDecomposition diag_dec(std::vector<double> mu) {
  SpectralDecomposition dec;
  dec.eigenvalues = Eigen::Map<Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  dec.eigenvectors = Matrix::Identity(dec.eigenvalues.size(), dec.eigenvalues.size());
  return dec;
}

}  // namespace

TEST(Features, ShapeAndDeterminism) {
  const auto x = sample_features(30, 200, 4);
  EXPECT_EQ(x.values.rows(), 30);
  EXPECT_EQ(x.values.cols(), 200);
  EXPECT_EQ(x.values, sample_features(30, 200, 4).values);
  EXPECT_NE(x.values, sample_features(30, 200, 5).values);
  EXPECT_ERROR_KIND(sample_features(0, 3, 0), ErrorKind::InvalidParameter);
}

TEST(Features, ColumnMeansAtScale) {
  const std::size_t n = 100000;
  const auto x = sample_features(n, 4, 12);
  const Vector means = x.values.colwise().mean();
  for (double m : means) EXPECT_LT(std::abs(m), 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Aggregate, IdentityOperatorReturnsFeatures) {
  const auto x = sample_features(5, 3, 1);
  const GraphOperator op = build_operator(Graph(5, {}), OperatorKind::ShiftPsd);
  const auto ds = aggregate(op, x, 1, 1.0);
  EXPECT_EQ(ds.samples, x.values);
  const Matrix cov = x.values.transpose() * x.values / 5.0;
  EXPECT_LT((ds.covariance - cov).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE(ds.has_spectral());
}

TEST(Aggregate, SingleEdgeShiftByHand) {
  FeatureMatrix x{Matrix::Identity(2, 2), 0};
  const auto ds = aggregate(build_operator(Graph(2, {{0, 1}}), OperatorKind::ShiftPsd), x, 1, 1.0);
  Matrix expected(2, 2);
  expected << 0.75, 0.25, 0.25, 0.75;
  EXPECT_LT((ds.samples - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Aggregate, TwoLayersEqualsAggregatingTwice) {
  const Graph g = generate_ba(40, 3, 2);
  const GraphOperator op = build_operator(g, OperatorKind::ShiftPsd);
  const auto x = sample_features(40, 6, 3);
  const auto once = aggregate(op, x, 1, 1.0);
  const auto twice = aggregate(op, FeatureMatrix{once.samples, 0}, 1, 1.0);
  const auto direct = aggregate(op, x, 2, 1.0);
  EXPECT_LT((direct.samples - twice.samples).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(direct.layers, 2);
}

TEST(Aggregate, Errors) {
  const GraphOperator op = build_operator(Graph(3, {}), OperatorKind::ShiftPsd);
  EXPECT_ERROR_KIND(aggregate(op, sample_features(4, 2, 0), 1, 1.0), ErrorKind::DimensionMismatch);
  EXPECT_ERROR_KIND(aggregate(op, sample_features(3, 2, 0), 0, 1.0), ErrorKind::InvalidParameter);
}

TEST(Aggregate, ShiftPsdCovarianceIsPsd) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = seed % 2 == 0 ? generate_ba(60, 3, seed) : generate_regular(60, 4, seed);
    const auto ds = aggregate(build_operator(g, OperatorKind::ShiftPsd),
                              sample_features(60, 8, seed + 100), 1 + static_cast<int>(seed % 3),
                              1.0);
    ASSERT_GE(ds.spectral.eigenvalues.minCoeff(), -1e-10) << seed;
  }
}

TEST(Aggregate, CovarianceSpectrumFollowsOperatorOrder) {
  const GraphOperator op = build_operator(generate_ba(500, 3, 0), OperatorKind::ShiftPsd);
  const auto ds = aggregate(op, sample_features(500, 64, 1), 1, 1.0);
  const auto g2 = eigh_symmetric(op.matrix * op.matrix);
  std::vector<double> a;
  std::vector<double> b;
  for (Eigen::Index i = 0; i < 10; ++i) {
    a.push_back(ds.spectral.eigenvalues[i] / ds.spectral.eigenvalues[0]);
    b.push_back(g2.eigenvalues[i] / g2.eigenvalues[0]);
  }
  EXPECT_NEAR(spearman_correlation(a, b), 1.0, 1e-12);
}

TEST(SampleFromSpectrum, IsotropicRowsAreStandardNormal) {
  const auto ds = sample_from_spectrum(synthetic_spectrum(4, 0.0), 20000, 1.0, 3);
  EXPECT_EQ(ds.rows(), 20000u);
  EXPECT_LT((ds.covariance - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(SampleFromSpectrum, ZeroEigenvalueKillsDirection) {
  const auto ds = sample_from_spectrum(diag_dec({1.0, 0.0}), 100, 1.0, 1);
  for (Eigen::Index i = 0; i < 100; ++i) EXPECT_EQ(ds.samples(i, 1), 0.0);
}

TEST(SampleFromSpectrum, CovarianceDiagonalAtScale) {
  const auto ds = sample_from_spectrum(diag_dec({2.0, 0.5}), 100000, 1.0, 8);
  EXPECT_NEAR(ds.covariance(0, 0), 2.0, 0.1);
  EXPECT_NEAR(ds.covariance(1, 1), 0.5, 0.025);
}

TEST(SampleFromSpectrum, SymmetrizeDoublesRowsAndKeepsCovariance) {
  const auto plain = sample_from_spectrum(synthetic_spectrum(6, 1.0), 300, 1.0, 9);
  const auto sym = sample_from_spectrum(synthetic_spectrum(6, 1.0), 300, 1.0, 9, true);
  EXPECT_EQ(sym.rows(), 600u);
  EXPECT_TRUE(sym.symmetrized);
  EXPECT_LT((sym.covariance - plain.covariance).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index i = 0; i < 300; ++i) {
    ASSERT_EQ(sym.samples.row(i + 300), (-sym.samples.row(i)).eval());
  }
}

TEST(SampleFromSpectrum, RejectsNegativeValues) {
  EXPECT_ERROR_KIND(sample_from_spectrum(diag_dec({1.0, -0.1}), 10, 1.0, 0),
                    ErrorKind::InvalidParameter);
}

TEST(Subset, PicksRequestedRows) {
  const auto ds = sample_from_spectrum(synthetic_spectrum(3, 1.0), 10, 1.0, 2);
  const std::vector<std::size_t> rows{7, 2};
  const auto sub = ds.subset(rows);
  EXPECT_EQ(sub.rows(), 2u);
  EXPECT_EQ(sub.samples.row(0), ds.samples.row(7));
  EXPECT_EQ(sub.samples.row(1), ds.samples.row(2));
  const std::vector<std::size_t> bad{10};
  EXPECT_ERROR_KIND(ds.subset(bad), ErrorKind::InvalidParameter);
}

TEST(GroundTruth, HeadAndTailDirections) {
  const auto dec = synthetic_spectrum(5, 1.0).as_decomposition();
  const auto head = make_ground_truth(dec, Alignment::head(1));
  const auto tail = make_ground_truth(dec, Alignment::tail(1));
  EXPECT_NEAR(head.theta_star.norm(), 1.0, 1e-15);
  EXPECT_EQ(head.theta_star, dec.eigenvectors.col(0));
  EXPECT_NEAR(head.theta_star.dot(tail.theta_star), 0.0, 1e-15);
  EXPECT_NEAR(tail.coords[4], 1.0, 1e-15);
}

TEST(GroundTruth, WeightedZeroIsUniform) {
  const auto gt = make_ground_truth(synthetic_spectrum(9, 2.0).as_decomposition(),
                                    Alignment::weighted(0.0));
  for (double c : gt.coords) EXPECT_NEAR(c, 1.0 / 3.0, 1e-15);
}

TEST(GroundTruth, UnitCoordinatesOnRandomBases) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = gnnrisk::testing::random_matrix(rng, 12, 7);
    const auto dec = eigh_symmetric(Matrix(a.transpose() * a));
    for (const Alignment al : {Alignment::head(3), Alignment::tail(2), Alignment::weighted(1.5)}) {
      const auto gt = make_ground_truth(dec, al);
      ASSERT_NEAR(gt.coords.squaredNorm(), 1.0, 1e-12);
    }
  }
}

TEST(GroundTruth, ErrorsAndNames) {
  const auto dec = synthetic_spectrum(4, 1.0).as_decomposition();
  EXPECT_ERROR_KIND(make_ground_truth(dec, Alignment::head(5)), ErrorKind::InvalidParameter);
  EXPECT_ERROR_KIND(make_ground_truth(dec, Alignment::tail(0)), ErrorKind::InvalidParameter);
  EXPECT_EQ(default_alignment_width(128), 13u);
  EXPECT_EQ(default_alignment_width(64), 7u);
  EXPECT_EQ(parse_alignment_kind("tail"), Alignment::Kind::Tail);
  EXPECT_ERROR_KIND(parse_alignment_kind("middle"), ErrorKind::InvalidParameter);
}

TEST(Responses, NoiseFreeCases) {
  auto ds = sample_from_spectrum(synthetic_spectrum(4, 1.0), 50, 0.0, 1);
  GroundTruth zero;
  zero.theta_star = Vector::Zero(4);
  EXPECT_EQ(generate_responses(ds, zero, 2), Vector::Zero(50));

  // Flip rows so every margin is positive; then y = D theta* exactly.
  const auto gt = make_ground_truth(ds.spectral, Alignment::head(2));
  Matrix d = ds.samples;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d.row(i).dot(gt.theta_star) < 0.0) d.row(i) *= -1.0;
  }
  const auto pos = AggregationDataset::from_samples(d, 0.0);
  EXPECT_EQ(generate_responses(pos, gt, 3), (d * gt.theta_star).eval());
}

TEST(Responses, NoiseVarianceAtScale) {
  const auto ds = sample_from_spectrum(synthetic_spectrum(4, 1.0), 10000, 1.0, 5);
  const auto gt = make_ground_truth(ds.spectral, Alignment::head(1));
  const Vector y = generate_responses(ds, gt, 6);
  const Vector margin = ds.samples * gt.theta_star;
  Vector eps(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) eps[i] = y[i] - std::max(0.0, margin[i]);
  const double mean = eps.mean();
  const double var = (eps.array() - mean).square().sum() / static_cast<double>(eps.size() - 1);
  EXPECT_NEAR(var, 1.0, 0.1);
  EXPECT_EQ(y, generate_responses(ds, gt, 6));
  GroundTruth wrong;
  wrong.theta_star = Vector::Zero(3);
  EXPECT_ERROR_KIND(generate_responses(ds, wrong, 0), ErrorKind::DimensionMismatch);
}

TEST(DatasetIo, CsvHasHeaderAndRows) {
  const auto ds = sample_from_spectrum(synthetic_spectrum(2, 1.0), 3, 1.0, 1);
  const std::string csv = dataset_to_csv(ds, Vector::Zero(3));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m1,m2,y");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_ERROR_KIND(dataset_to_csv(ds, Vector::Zero(2)), ErrorKind::DimensionMismatch);
  const std::string side = dataset_sidecar_json(ds, 1, Alignment::head(1));
  EXPECT_NE(side.find("\"symmetrized\""), std::string::npos);
}
