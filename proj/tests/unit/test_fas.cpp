#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fedpg/fas.hpp"

namespace fedpg {
namespace {

// Scalar oracle written from the correlation definition.
double oracle_entry(int h1, int h2, int g1, int g2, int rows, int cols, double w1, double w2) {
  const double d1 = rows > 1 ? std::abs(h1 - g1) * w1 / (rows - 1) : 0.0;
  const double d2 = cols > 1 ? std::abs(h2 - g2) * w2 / (cols - 1) : 0.0;
  const double x = 2.0 * std::sqrt(d1 * d1 + d2 * d2);
  return x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

TEST(Sinc, Values) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(1.0), 0.0, 1e-16);
  EXPECT_NEAR(sinc(1.5), -1.0 / (1.5 * std::numbers::pi), 1e-15);
}

TEST(BuildCorrelation, AdjacentPortExample) {
  const PortGrid grid{5, 5, 3.0, 3.0};
  const Eigen::MatrixXd r = build_correlation(grid);
  // Port 0 = (0,0); port 5 = (1,0): adjacent along the first axis.
  EXPECT_NEAR(port_distance(grid, 0, 5), 0.75, 1e-15);
  EXPECT_NEAR(r(0, 5), -0.21221, 5e-6);
  EXPECT_NEAR(r(0, 5), -1.0 / (1.5 * std::numbers::pi), 1e-14);
  EXPECT_NEAR(r(0, 1), r(0, 5), 1e-15);
}

TEST(BuildCorrelation, MatchesScalarOracle) {
  for (int rows : {1, 2, 4, 5}) {
    for (int cols : {1, 2, 4, 5}) {
      for (double w : {0.5, 1.0, 3.0}) {
        const PortGrid grid{rows, cols, w, w * 0.7};
        const Eigen::MatrixXd r = build_correlation(grid);
        ASSERT_EQ(r.rows(), rows * cols);
        for (int h = 0; h < grid.ports(); ++h) {
          for (int g = 0; g < grid.ports(); ++g) {
            const double expected =
                oracle_entry(h / cols, h % cols, g / cols, g % cols, rows, cols, w, w * 0.7);
            EXPECT_NEAR(r(h, g), expected, 1e-14);
            EXPECT_EQ(r(h, g), r(g, h));
            EXPECT_LE(std::abs(r(h, g)), 1.0);
          }
          EXPECT_EQ(r(h, h), 1.0);
        }
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff();
        EXPECT_GE(min_eig, -1e-8) << rows << "x" << cols << " W=" << w;
      }
    }
  }
}

TEST(Factorize, IdentityGivesIdentityFactor) {
  const CorrelatedSampler s = factorize(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_TRUE((s.factor() * s.factor().transpose()).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-14));
  EXPECT_TRUE(s.factor().cwiseAbs().isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-14));
}

TEST(Factorize, ReconstructsCorrelation) {
  const Eigen::MatrixXd r = build_correlation({5, 5, 3.0, 3.0});
  const CorrelatedSampler s(r);
  const Eigen::MatrixXd llt = s.factor() * s.factor().transpose();
  EXPECT_LE((llt - r).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((llt - s.repaired()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Factorize, RepairsSlightlyNegativeSpectrum) {
  // Build a matrix with eigenvalues (2, 1, -1e-12) in a rotated basis.
  Eigen::MatrixXd q = Eigen::MatrixXd::Random(3, 3);
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ();
  const Eigen::Vector3d lambda(2.0, 1.0, -1e-12);
  Eigen::MatrixXd m = q * lambda.asDiagonal() * q.transpose();
  m = 0.5 * (m + m.transpose());
  const CorrelatedSampler s(m);
  EXPECT_LT(s.min_eigenvalue_before_repair(), 0.0);
  const double min_after =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.repaired()).eigenvalues().minCoeff();
  EXPECT_GE(min_after, -1e-15);
  EXPECT_LE((s.repaired() - m).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Factorize, RejectsInvalidInput) {
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.3;
  EXPECT_THROW(CorrelatedSampler{asym}, std::invalid_argument);
  EXPECT_THROW(CorrelatedSampler{Eigen::MatrixXd::Identity(2, 3)}, std::invalid_argument);
}

// Empirical second moments of sample_rows over `draws` rows.
struct Moments {
  Eigen::MatrixXcd port_cov;
  Eigen::MatrixXd re_var;
  Eigen::MatrixXcd cross_row;
};

Moments moments(const CorrelatedSampler& s, int draws, std::uint64_t seed) {
  const int h = s.dimension();
  Rng rng = derive_stream(seed, StreamRole::kScenario);
  Moments m{Eigen::MatrixXcd::Zero(h, h), Eigen::MatrixXd::Zero(1, h), Eigen::MatrixXcd::Zero(h, h)};
  for (int i = 0; i < draws; ++i) {
    const Eigen::MatrixXcd rows = s.sample_rows(2, rng);
    const Eigen::VectorXcd a = rows.row(0).transpose();
    const Eigen::VectorXcd b = rows.row(1).transpose();
    m.port_cov += a * a.adjoint();
    m.cross_row += a * b.adjoint();
    m.re_var += a.real().cwiseAbs2().transpose();
  }
  m.port_cov /= draws;
  m.cross_row /= draws;
  m.re_var /= draws;
  return m;
}

TEST(SampleRows, IdentityCovariance) {
  const CorrelatedSampler s(Eigen::MatrixXd::Identity(4, 4));
  const Moments m = moments(s, 100000, 11);
  EXPECT_LE((m.port_cov - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LE((m.re_var.array() - 0.5).abs().maxCoeff(), 0.01);
}

TEST(SampleRows, PortCovarianceMatchesCorrelation) {
  const Eigen::MatrixXd r = build_correlation({5, 5, 3.0, 3.0});
  const CorrelatedSampler s(r);
  const Moments m = moments(s, 100000, 12);
  EXPECT_LE((m.port_cov - r.cast<std::complex<double>>()).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LE(m.cross_row.cwiseAbs().maxCoeff(), 0.02);
}

TEST(SampleRows, Shape) {
  const CorrelatedSampler s(build_correlation({2, 3, 1.0, 1.0}));
  Rng rng = derive_stream(1, StreamRole::kScenario);
  const Eigen::MatrixXcd rows = s.sample_rows(7, rng);
  EXPECT_EQ(rows.rows(), 7);
  EXPECT_EQ(rows.cols(), 6);
}

}  // namespace
}  // namespace fedpg
