#pragma once

#include <Eigen/Dense>

#include "fedpg/random.hpp"

namespace fedpg {

/// Fluid-antenna port layout: rows x cols ports spread over an aperture of
/// size_w1 x size_w2 wavelengths. Port h maps to (h / cols, h % cols).
struct PortGrid {
  int rows = 5;
  int cols = 5;
  double size_w1 = 3.0;
  double size_w2 = 3.0;

  int ports() const { return rows * cols; }
};

/// Normalized sinc, sin(pi x) / (pi x) with sinc(0) = 1.
double sinc(double x);

/// Distance in wavelengths between two ports of the grid.
double port_distance(const PortGrid& grid, int h, int h_other);

/// Symmetric, unit-diagonal port correlation under isotropic 3-D scattering:
/// entry (h, h') = sinc(2 * d(h, h')) with d in wavelengths. A single-row or
/// single-column axis contributes no offset.
Eigen::MatrixXd build_correlation(const PortGrid& grid);

/// Square-root factor of a (repaired) correlation matrix used to draw
/// port-correlated Gaussian rows.
class CorrelatedSampler {
 public:
  /// Eigendecomposes `correlation`, clamps negative eigenvalues to zero and
  /// stores L = V sqrt(Lambda). Throws std::invalid_argument if the input is
  /// not square or not symmetric.
  explicit CorrelatedSampler(const Eigen::MatrixXd& correlation);

  int dimension() const { return static_cast<int>(factor_.rows()); }
  const Eigen::MatrixXd& factor() const { return factor_; }
  /// L * L^T, i.e. the PSD matrix actually sampled from.
  const Eigen::MatrixXd& repaired() const { return repaired_; }
  double min_eigenvalue_before_repair() const { return min_eigenvalue_; }

  /// m_rows independent rows, each row ~ CN(0, R) across ports.
  Eigen::MatrixXcd sample_rows(int m_rows, Rng& rng) const;

 private:
  Eigen::MatrixXd factor_;
  Eigen::MatrixXd repaired_;
  double min_eigenvalue_ = 0.0;
};

inline CorrelatedSampler factorize(const Eigen::MatrixXd& correlation) {
  return CorrelatedSampler(correlation);
}

}  // namespace fedpg
