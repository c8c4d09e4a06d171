#include "speckle/quantum_stats.hpp"

#include <cmath>
#include <string>

#include "speckle/errors.hpp"

namespace speckle {

namespace {

constexpr double kPlanck = 6.62607015e-34;      // J s (exact, SI 2019)
constexpr double kSpeedOfLight = 299792458.0;   // m / s (exact)

void require_aligned(const SqueezedInput& input) {
  if (input.alpha_phase != 0.0 || input.squeeze_phase != 0.0) throw NonzeroPhase();
}

// Moments from the fed-port sums tau_N = sum_{k<=N} T, A_N = sum_{k<=N} |t|
// and the vacuum weight reaching the focus from all other ports.
double mean_from(double tau_n, double abs_t_n, const SqueezedInput& in) {
  const double sh2 = std::sinh(in.squeeze) * std::sinh(in.squeeze);
  return tau_n * sh2 + in.alpha2() * abs_t_n * abs_t_n;
}

double variance_from(double tau_n, double abs_t_n, double sum_r, double tau_empty,
                     const SqueezedInput& in) {
  const double g = in.squeeze;
  const double sh2 = std::sinh(g) * std::sinh(g);
  const double ch2 = std::cosh(g) * std::cosh(g);
  const double squeezed_noise = tau_n * tau_n * 2.0 * sh2 * ch2;
  const double reflected_beat = tau_n * sum_r * sh2;
  const double empty_port_beat = tau_n * tau_empty * sh2;
  // 1 - e^{-2g} written with expm1 to keep precision at small g.
  const double suppression = -std::expm1(-2.0 * g);
  const double coherent =
      in.alpha2() * abs_t_n * abs_t_n * (1.0 - tau_n * suppression);
  return squeezed_noise + reflected_beat + empty_port_beat + coherent;
}

std::size_t checked_fed_modes(const SqueezedInput& input, std::size_t channels) {
  input.validate();
  if (input.fed_modes > channels)
    throw InvalidArgument("fed modes N = " + std::to_string(input.fed_modes) +
                          " exceeds channel count M = " + std::to_string(channels));
  return input.fed_modes;
}

void require_full(const CouplingSums& sums, const SqueezedInput& input) {
  input.validate();
  if (input.fed_modes != sums.channels())
    throw InvalidArgument("full-filling formula requires N = M; use the partial form");
}

}  // namespace

void SqueezedInput::validate() const {
  if (!(alpha_mag >= 0.0) || !std::isfinite(alpha_mag))
    throw InvalidArgument("|alpha| must be finite and >= 0");
  if (!(squeeze >= 0.0) || !std::isfinite(squeeze))
    throw InvalidArgument("squeezing strength g must be finite and >= 0");
  if (fed_modes == 0) throw InvalidArgument("fed modes N must be >= 1");
}

SqueezedInput SqueezedInput::aligned(double alpha2, double squeeze, std::size_t fed_modes) {
  if (!(alpha2 >= 0.0)) throw InvalidArgument("|alpha|^2 must be >= 0");
  SqueezedInput in;
  in.alpha_mag = std::sqrt(alpha2);
  in.squeeze = squeeze;
  in.fed_modes = fed_modes;
  in.validate();
  return in;
}

void LossChannel::validate() const {
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0))
    throw InvalidArgument("loss rate |q|^2 must lie in [0, 1]");
}

double mean_photon(const CouplingSums& sums, const SqueezedInput& input) {
  require_full(sums, input);
  return mean_from(sums.sum_T, sums.sum_abs_t, input);
}

double variance_photon(const CouplingSums& sums, const SqueezedInput& input) {
  require_full(sums, input);
  require_aligned(input);
  return variance_from(sums.sum_T, sums.sum_abs_t, sums.sum_R, 0.0, input);
}

double mean_photon_partial(const ScatteringRealization& real, const SqueezedInput& input) {
  const auto sums = coupling_sums(real);
  const std::size_t n = checked_fed_modes(input, sums.channels());
  return mean_from(sums.prefix_T[n], sums.prefix_abs_t[n], input);
}

double variance_photon_partial(const ScatteringRealization& real, const SqueezedInput& input) {
  const auto sums = coupling_sums(real);
  const std::size_t n = checked_fed_modes(input, sums.channels());
  require_aligned(input);
  const double tau_n = sums.prefix_T[n];
  const double tau_empty = sums.sum_T - tau_n;
  return variance_from(tau_n, sums.prefix_abs_t[n], sums.sum_R, tau_empty, input);
}

PhotonMoments photon_moments(const ScatteringRealization& real, const SqueezedInput& input) {
  return {mean_photon_partial(real, input), variance_photon_partial(real, input)};
}

PhotonMoments photon_moments_large_alpha(const ScatteringRealization& real,
                                         const SqueezedInput& input) {
  const auto sums = coupling_sums(real);
  const std::size_t n = checked_fed_modes(input, sums.channels());
  require_aligned(input);
  const double a = sums.prefix_abs_t[n];
  const double mean = input.alpha2() * a * a;
  const double suppression = -std::expm1(-2.0 * input.squeeze);
  return {mean, mean * (1.0 - sums.prefix_T[n] * suppression)};
}

double fano(const PhotonMoments& m) {
  if (m.mean == 0.0) throw ZeroMean();
  if (m.mean < 0.0) throw InvalidArgument("mean photon number must be nonnegative");
  return m.variance / m.mean;
}

double snr(const PhotonMoments& m) {
  if (m.variance == 0.0) throw ZeroVariance();
  if (m.variance < 0.0) throw InvalidArgument("variance must be nonnegative");
  return m.mean * m.mean / m.variance;
}

double asymptotic_avg_fano(double s, double g) {
  if (!(s > 1.0)) throw InvalidArgument("disorder strength s must be > 1");
  if (!(g >= 0.0)) throw InvalidArgument("squeezing strength g must be >= 0");
  return 1.0 + std::expm1(-2.0 * g) / s;
}

double asymptotic_avg_snr_ratio(double s, double g) { return 1.0 / asymptotic_avg_fano(s, g); }

PhotonMoments apply_loss(const PhotonMoments& m, const LossChannel& loss) {
  loss.validate();
  const double p2 = loss.transmittance();
  const double q2 = loss.loss_rate;
  return {p2 * m.mean, p2 * p2 * m.variance + p2 * q2 * m.mean};
}

double photon_budget(double wavelength_m, double power_w, double duration_s,
                     double focus_fraction) {
  if (!(wavelength_m > 0.0) || !(power_w > 0.0) || !(duration_s > 0.0))
    throw InvalidArgument("wavelength, power and duration must be positive");
  if (!(focus_fraction > 0.0 && focus_fraction <= 1.0))
    throw InvalidArgument("focus fraction must lie in (0, 1]");
  const double photon_energy = kPlanck * kSpeedOfLight / wavelength_m;
  return power_w * duration_s * focus_fraction / photon_energy;
}

}  // namespace speckle
