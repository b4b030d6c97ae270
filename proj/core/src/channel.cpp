#include "fedpg/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fedpg {

RicianParams RicianParams::from_db(double k_lr_db, double k_ru_db,
                                   double carrier_freq_hz) {
  if (!(carrier_freq_hz > 0.0)) {
    throw std::invalid_argument("RicianParams: carrier frequency must be positive");
  }
  return {std::pow(10.0, k_lr_db / 10.0), std::pow(10.0, k_ru_db / 10.0),
          kSpeedOfLight / carrier_freq_hz};
}

double compute_avg_snr(double eirp_psd_dbw_4khz, double noise_psd_dbm_hz,
                       double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("compute_avg_snr: bandwidth must be positive");
  }
  const double power_dbw = eirp_psd_dbw_4khz + 10.0 * std::log10(bandwidth_hz / 4000.0);
  const double noise_dbw = (noise_psd_dbm_hz - 30.0) + 10.0 * std::log10(bandwidth_hz);
  return std::pow(10.0, (power_dbw - noise_dbw) / 10.0);
}

LinkBudget LinkBudget::make(double eirp_psd_dbw_4khz, double noise_psd_dbm_hz,
                            double bandwidth_hz, double carrier_freq_hz) {
  LinkBudget b;
  b.eirp_psd_dbw_4khz = eirp_psd_dbw_4khz;
  b.noise_psd_dbm_hz = noise_psd_dbm_hz;
  b.bandwidth_hz = bandwidth_hz;
  b.carrier_freq_hz = carrier_freq_hz;
  b.avg_snr = compute_avg_snr(eirp_psd_dbw_4khz, noise_psd_dbm_hz, bandwidth_hz);
  return b;
}

double path_amplitude(double wavelength, double dist) {
  if (!(dist > 0.0)) throw std::invalid_argument("channel: distance must be positive");
  return wavelength / (4.0 * std::numbers::pi * dist);
}

namespace {

template <typename Mat>
Mat compose(double amplitude, double k, const Mat& nlos) {
  if (std::isinf(k)) return Mat::Constant(nlos.rows(), nlos.cols(), amplitude);
  const double scale = amplitude / std::sqrt(k + 1.0);
  return (nlos.array() + std::sqrt(k)).matrix() * scale;
}

Eigen::VectorXcd iid_normal(int n, Rng& rng) {
  Eigen::VectorXcd g(n);
  for (int i = 0; i < n; ++i) g(i) = complex_normal(rng);
  return g;
}

}  // namespace

Eigen::VectorXcd compose_rician(double amplitude, double k,
                                const Eigen::VectorXcd& nlos) {
  return compose(amplitude, k, nlos);
}

Eigen::MatrixXcd compose_rician(double amplitude, double k,
                                const Eigen::MatrixXcd& nlos) {
  return compose(amplitude, k, nlos);
}

Eigen::VectorXcd lr_channel(const RicianParams& params, double dist,
                            int m_elems, Rng& rng) {
  const double a = path_amplitude(params.wavelength, dist);
  return compose_rician(a, params.k_lr, iid_normal(m_elems, rng));
}

Eigen::MatrixXcd ru_channel_fas(const RicianParams& params, double dist,
                                const CorrelatedSampler& sampler, int m_elems,
                                Rng& rng) {
  const double a = path_amplitude(params.wavelength, dist);
  return compose_rician(a, params.k_ru, sampler.sample_rows(m_elems, rng));
}

Eigen::VectorXcd ru_channel_plain(const RicianParams& params, double dist,
                                  int m_elems, Rng& rng) {
  const double a = path_amplitude(params.wavelength, dist);
  return compose_rician(a, params.k_ru, iid_normal(m_elems, rng));
}

Eigen::VectorXcd phase_matrix(const PhaseControl& control) {
  if (control.levels < 1) throw std::invalid_argument("phase_matrix: levels must be >= 1");
  const auto m = static_cast<Eigen::Index>(control.level.size());
  Eigen::VectorXcd diag(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int c = control.level[static_cast<std::size_t>(i)];
    if (c < 1 || c > control.levels) {
      throw std::invalid_argument("phase_matrix: level out of range");
    }
    diag(i) = std::polar(1.0, 2.0 * std::numbers::pi * (c - 1) / control.levels);
  }
  return diag;
}

PortSelection select_port(const Eigen::VectorXcd& lr,
                          const Eigen::VectorXcd& phase,
                          const Eigen::MatrixXcd& ru_fas) {
  if (lr.size() != phase.size() || lr.size() != ru_fas.rows() || ru_fas.cols() == 0) {
    throw std::invalid_argument("select_port: dimension mismatch");
  }
  // Per-port evaluation through equivalent_channel keeps the selected gain
  // bit-identical to the value any single port would report.
  PortSelection best{0, equivalent_channel(lr, phase, ru_fas.col(0))};
  double best_gain = std::norm(best.gain);
  for (Eigen::Index h = 1; h < ru_fas.cols(); ++h) {
    const std::complex<double> c = equivalent_channel(lr, phase, ru_fas.col(h));
    const double g = std::norm(c);
    if (g > best_gain) {
      best_gain = g;
      best = {static_cast<int>(h), c};
    }
  }
  return best;
}

std::complex<double> equivalent_channel(const Eigen::VectorXcd& lr,
                                        const Eigen::VectorXcd& phase,
                                        const Eigen::VectorXcd& ru) {
  if (lr.size() != phase.size() || lr.size() != ru.size()) {
    throw std::invalid_argument("equivalent_channel: length mismatch");
  }
  return (lr.array() * phase.array() * ru.array()).sum();
}

double rate(std::complex<double> equivalent, const LinkBudget& budget) {
  const double snr = budget.avg_snr * std::norm(equivalent);
  return budget.bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

}  // namespace fedpg
