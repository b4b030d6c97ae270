#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fedpg/fas.hpp"
#include "fedpg/random.hpp"

namespace fedpg {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct RicianParams {
  double k_lr = 0.0;  // linear
  double k_ru = 0.0;  // linear
  double wavelength = 0.0;

  static RicianParams from_db(double k_lr_db, double k_ru_db,
                              double carrier_freq_hz);
};

struct LinkBudget {
  double eirp_psd_dbw_4khz = -16.82;
  double noise_psd_dbm_hz = -174.0;
  double bandwidth_hz = 2e7;
  double carrier_freq_hz = 1.17e10;
  double avg_snr = 0.0;  // linear, derived from the three densities above

  static LinkBudget make(double eirp_psd_dbw_4khz, double noise_psd_dbm_hz,
                         double bandwidth_hz, double carrier_freq_hz);
};

/// Average SNR from an EIRP density quoted per 4 kHz and a thermal noise
/// density. All antenna gains are assumed folded into the EIRP.
double compute_avg_snr(double eirp_psd_dbw_4khz, double noise_psd_dbm_hz,
                       double bandwidth_hz);

/// Free-space amplitude lambda / (4 pi d).
double path_amplitude(double wavelength, double dist);

/// Rician composition a / sqrt(K+1) * (sqrt(K) * 1 + nlos). An infinite K
/// yields the pure line-of-sight value a for every entry.
Eigen::VectorXcd compose_rician(double amplitude, double k,
                                const Eigen::VectorXcd& nlos);
Eigen::MatrixXcd compose_rician(double amplitude, double k,
                                const Eigen::MatrixXcd& nlos);

/// Satellite to RIS: one coefficient per reflecting element.
Eigen::VectorXcd lr_channel(const RicianParams& params, double dist,
                            int m_elems, Rng& rng);

/// RIS to a fluid-antenna user: M x H, elements independent, ports
/// correlated through `sampler`.
Eigen::MatrixXcd ru_channel_fas(const RicianParams& params, double dist,
                                const CorrelatedSampler& sampler, int m_elems,
                                Rng& rng);

/// RIS to a conventional single-antenna user.
Eigen::VectorXcd ru_channel_plain(const RicianParams& params, double dist,
                                  int m_elems, Rng& rng);

/// Discrete RIS phase configuration; levels are 1-based, c in {1..C}.
struct PhaseControl {
  int levels = 0;
  std::vector<int> level;
};

/// Diagonal of the phase-shift matrix, exp(j 2 pi (c-1) / C) per element.
Eigen::VectorXcd phase_matrix(const PhaseControl& control);

struct PortSelection {
  int port = 0;
  std::complex<double> gain;
};

/// Activates the port with the largest cascaded gain |lr^T Phi H|_h^2.
/// Ties go to the lowest port index.
PortSelection select_port(const Eigen::VectorXcd& lr,
                          const Eigen::VectorXcd& phase,
                          const Eigen::MatrixXcd& ru_fas);

std::complex<double> equivalent_channel(const Eigen::VectorXcd& lr,
                                        const Eigen::VectorXcd& phase,
                                        const Eigen::VectorXcd& ru);

/// Shannon rate B log2(1 + snr |h|^2) in bits per second.
double rate(std::complex<double> equivalent, const LinkBudget& budget);

struct ChannelDraw {
  Eigen::VectorXcd lr;
  std::variant<Eigen::MatrixXcd, Eigen::VectorXcd> ru;
  std::complex<double> equivalent;
  std::optional<int> active_port;
};

}  // namespace fedpg
