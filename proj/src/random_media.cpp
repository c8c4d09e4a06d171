#include "speckle/random_media.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "speckle/errors.hpp"

namespace speckle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(phi, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  // fmod of a value just below 0 can round up to exactly 2*pi
  return wrapped >= two_pi ? 0.0 : wrapped;
}

}  // namespace

void DisorderParams::validate() const {
  if (channels == 0) throw InvalidArgument("channel count M must be >= 1");
  if (!(disorder > 1.0) || !std::isfinite(disorder))
    throw InvalidArgument("disorder strength s must be > 1, got " + std::to_string(disorder));
}

ScatteringRealization ScatteringRealization::from_amplitudes(std::vector<double> t_amp,
                                                             std::vector<double> r_amp) {
  if (t_amp.size() != r_amp.size() || t_amp.empty())
    throw InvalidArgument("t_amp and r_amp must be nonempty and of equal length");
  double flux = 0.0;
  for (double a : t_amp) {
    if (!(a >= 0.0)) throw InvalidArgument("amplitudes must be nonnegative");
    flux += a * a;
  }
  for (double a : r_amp) {
    if (!(a >= 0.0)) throw InvalidArgument("amplitudes must be nonnegative");
    flux += a * a;
  }
  if (std::abs(flux - 1.0) > 1e-12)
    throw InvalidArgument("flux not conserved: sum |t|^2 + sum |r|^2 = " + std::to_string(flux));
  ScatteringRealization real;
  real.t_phase.assign(t_amp.size(), 0.0);
  real.r_phase.assign(r_amp.size(), 0.0);
  real.t_amp = std::move(t_amp);
  real.r_amp = std::move(r_amp);
  return real;
}

double CouplingSums::partial_sum_T(std::size_t n) const {
  if (n > channels()) throw InvalidArgument("partial sum index exceeds channel count");
  return prefix_T[n];
}

double CouplingSums::partial_sum_abs_t(std::size_t n) const {
  if (n > channels()) throw InvalidArgument("partial sum index exceeds channel count");
  return prefix_abs_t[n];
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

ScatteringRealization sample_realization(const DisorderParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t m = params.channels;
  const double s = params.disorder;
  // Transmission intensities are exponential (Rayleigh amplitudes) with mean
  // 1/(M s). Reflection intensities share the same scale with shape s - 1, so
  // after the common rescale the intensities are Dirichlet distributed and
  // E[sum T] = 1/s holds exactly at every M.
  const double scale = 1.0 / (static_cast<double>(m) * s);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> reflect(s - 1.0, scale);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  ScatteringRealization real;
  real.t_amp.resize(m);
  real.t_phase.resize(m);
  real.r_amp.resize(m);
  real.r_phase.resize(m);

  const double quad_sigma = std::sqrt(scale / 2.0);
  double flux = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double re = quad_sigma * normal(rng);
    const double im = quad_sigma * normal(rng);
    real.t_amp[k] = std::hypot(re, im);
    real.t_phase[k] = wrap_phase(std::atan2(im, re));
    flux += re * re + im * im;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double intensity = reflect(rng);
    real.r_amp[k] = std::sqrt(intensity);
    real.r_phase[k] = phase(rng);
    flux += intensity;
  }

  const double norm = 1.0 / std::sqrt(flux);
  for (double& a : real.t_amp) a *= norm;
  for (double& a : real.r_amp) a *= norm;
  return real;
}

CouplingSums coupling_sums(const ScatteringRealization& real) {
  const std::size_t m = real.channels();
  CouplingSums sums;
  sums.prefix_T.resize(m + 1, 0.0);
  sums.prefix_abs_t.resize(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = real.t_amp[k];
    sums.prefix_T[k + 1] = sums.prefix_T[k] + a * a;
    sums.prefix_abs_t[k + 1] = sums.prefix_abs_t[k] + a;
  }
  sums.sum_T = sums.prefix_T[m];
  sums.sum_abs_t = sums.prefix_abs_t[m];
  for (double a : real.r_amp) sums.sum_R += a * a;
  return sums;
}

CouplingStats ensemble_coupling_stats(const DisorderParams& params, std::size_t trials,
                                      std::uint64_t seed) {
  params.validate();
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  double sum_t = 0.0, sum_t2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto sums = coupling_sums(sample_realization(params, derive_seed(seed, i)));
    sum_t += sums.sum_T;
    sum_t2 += sums.sum_T * sums.sum_T;
    sum_r += sums.sum_R;
    sum_r2 += sums.sum_R * sums.sum_R;
  }
  const double n = static_cast<double>(trials);
  CouplingStats stats;
  stats.trials = trials;
  stats.mean_T = sum_t / n;
  stats.mean_R = sum_r / n;
  if (trials > 1) {
    const double var_t = std::max(0.0, (sum_t2 - n * stats.mean_T * stats.mean_T) / (n - 1.0));
    const double var_r = std::max(0.0, (sum_r2 - n * stats.mean_R * stats.mean_R) / (n - 1.0));
    stats.stderr_T = std::sqrt(var_t / n);
    stats.stderr_R = std::sqrt(var_r / n);
  }
  return stats;
}

}  // namespace speckle
