#include "fedpg/fas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fedpg {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double port_distance(const PortGrid& grid, int h, int h_other) {
  const int dr = std::abs(h / grid.cols - h_other / grid.cols);
  const int dc = std::abs(h % grid.cols - h_other % grid.cols);
  const double along_rows =
      grid.rows > 1 ? dr * grid.size_w1 / (grid.rows - 1) : 0.0;
  const double along_cols =
      grid.cols > 1 ? dc * grid.size_w2 / (grid.cols - 1) : 0.0;
  return std::hypot(along_rows, along_cols);
}

Eigen::MatrixXd build_correlation(const PortGrid& grid) {
  if (grid.rows < 1 || grid.cols < 1 || !(grid.size_w1 > 0.0) ||
      !(grid.size_w2 > 0.0)) {
    throw std::invalid_argument("build_correlation: invalid port grid");
  }
  const int n = grid.ports();
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      r(i, j) = r(j, i) = sinc(2.0 * port_distance(grid, i, j));
    }
  }
  return r;
}

CorrelatedSampler::CorrelatedSampler(const Eigen::MatrixXd& correlation) {
  if (correlation.rows() != correlation.cols() || correlation.rows() == 0) {
    throw std::invalid_argument("factorize: correlation must be square");
  }
  if ((correlation - correlation.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("factorize: correlation must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("factorize: eigendecomposition failed");
  }
  const Eigen::VectorXd values = eig.eigenvalues();
  min_eigenvalue_ = values.minCoeff();
  const Eigen::VectorXd roots = values.cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * roots.asDiagonal();
  repaired_ = factor_ * factor_.transpose();
}

Eigen::MatrixXcd CorrelatedSampler::sample_rows(int m_rows, Rng& rng) const {
  if (m_rows < 1) throw std::invalid_argument("sample_rows: m_rows must be >= 1");
  const int h = dimension();
  Eigen::MatrixXcd z(h, m_rows);
  for (int row = 0; row < m_rows; ++row) {
    for (int p = 0; p < h; ++p) z(p, row) = complex_normal(rng);
  }
  // Column j of L z is row j of the result.
  return (factor_.cast<std::complex<double>>() * z).transpose();
}

}  // namespace fedpg
