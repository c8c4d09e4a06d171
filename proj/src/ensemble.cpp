#include "speckle/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "speckle/errors.hpp"
#include "speckle/gaussian_oracle.hpp"
#include "speckle/prolate.hpp"

namespace speckle {

namespace {

// Runs body(i) for i in [0, count) on `workers` threads with a static
// interleaved assignment. Callers write into slot i only.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<ScatteringRealization> sample_ensemble(const DisorderParams& disorder,
                                                   std::size_t trials, std::uint64_t seed,
                                                   std::size_t workers) {
  std::vector<ScatteringRealization> out(trials);
  parallel_for(trials, workers,
               [&](std::size_t i) { out[i] = sample_realization(disorder, derive_seed(seed, i)); });
  return out;
}

struct TrialSetup {
  SqueezedInput input;
  LossChannel loss;
  Formula formula;
};

PhotonMoments trial_moments(const ScatteringRealization& real, const TrialSetup& setup) {
  return setup.formula == Formula::Exact ? photon_moments(real, setup.input)
                                         : photon_moments_large_alpha(real, setup.input);
}

// `moments` are lossless; the loss channel enters through
// F_L = |p|^2 F + |q|^2, which stays defined at |q|^2 = 1.
SweepRow aggregate(double axis_value, const std::vector<PhotonMoments>& moments,
                   const LossChannel& loss) {
  const double n = static_cast<double>(moments.size());
  const double p2 = loss.transmittance(), q2 = loss.loss_rate;
  std::vector<double> f(moments.size());
  double sum_mean = 0.0, sum_var = 0.0, sum_f = 0.0;
  for (std::size_t i = 0; i < moments.size(); ++i) {
    f[i] = p2 * fano(moments[i]) + q2;
    const auto lossy = apply_loss(moments[i], loss);
    sum_mean += lossy.mean;
    sum_var += lossy.variance;
    sum_f += f[i];
  }
  double lossless_mean = 0.0, lossless_var = 0.0;
  for (const auto& m : moments) {
    lossless_mean += m.mean;
    lossless_var += m.variance;
  }
  SweepRow row;
  row.axis_value = axis_value;
  row.trials = moments.size();
  row.mean_n = sum_mean / n;
  row.mean_variance = sum_var / n;
  row.fano_ratio = sum_f / n;
  row.fano_of_means = p2 * (lossless_var / lossless_mean) + q2;
  if (moments.size() > 1) {
    double ss_f = 0.0, ss_n = 0.0;
    for (std::size_t i = 0; i < moments.size(); ++i) {
      const double df = f[i] - row.fano_ratio;
      const double dn = p2 * moments[i].mean - row.mean_n;
      ss_f += df * df;
      ss_n += dn * dn;
    }
    row.stderr_fano = std::sqrt(ss_f / (n - 1.0) / n);
    row.stderr_mean_n = std::sqrt(ss_n / (n - 1.0) / n);
  }
  row.snr_ratio = 1.0 / row.fano_ratio;
  row.stderr_snr = row.stderr_fano / (row.fano_ratio * row.fano_ratio);
  return row;
}

TrialSetup setup_for(const SweepSpec& spec, double value) {
  TrialSetup setup{spec.input, spec.loss, spec.formula};
  const std::size_t m = spec.disorder.channels;
  switch (spec.axis) {
    case SweepAxis::SqueezeG:
      if (!(value >= 0.0)) throw InvalidArgument("squeezing strength g must be >= 0");
      setup.input.squeeze = value;
      break;
    case SweepAxis::DisorderS:
      break;
    case SweepAxis::ModeFillRatio: {
      const auto fed = static_cast<long long>(std::llround(value * static_cast<double>(m)));
      if (fed < 1 || fed > static_cast<long long>(m))
        throw InvalidArgument("mode fill ratio " + std::to_string(value) +
                              " gives N outside [1, M]");
      setup.input.fed_modes = static_cast<std::size_t>(fed);
      break;
    }
    case SweepAxis::LossRate:
      setup.loss.loss_rate = value;
      setup.loss.validate();
      break;
    case SweepAxis::CoherentFraction: {
      if (!(value > 0.0 && value < 1.0))
        throw InvalidArgument("coherent fraction must lie in (0, 1)");
      const double sh = std::sinh(spec.input.squeeze);
      if (sh == 0.0) throw InvalidArgument("coherent fraction axis requires g > 0");
      setup.input.alpha_mag = std::sqrt(value * sh * sh / (1.0 - value));
      break;
    }
    case SweepAxis::PhotonBudget:
      if (!(value >= 0.0)) throw InvalidArgument("|alpha|^2 must be >= 0");
      setup.input.alpha_mag = std::sqrt(value);
      break;
  }
  setup.input.validate();
  if (setup.input.fed_modes > m)
    throw InvalidArgument("fed modes N exceeds channel count M");
  return setup;
}

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SqueezeG: return "g";
    case SweepAxis::DisorderS: return "s";
    case SweepAxis::ModeFillRatio: return "fill";
    case SweepAxis::LossRate: return "loss";
    case SweepAxis::CoherentFraction: return "coherent-fraction";
    case SweepAxis::PhotonBudget: return "alpha2";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "g" || name == "squeeze_g") return SweepAxis::SqueezeG;
  if (name == "s" || name == "disorder_s") return SweepAxis::DisorderS;
  if (name == "fill" || name == "mode_fill_ratio") return SweepAxis::ModeFillRatio;
  if (name == "loss" || name == "loss_rate") return SweepAxis::LossRate;
  if (name == "coherent-fraction" || name == "coherent_fraction")
    return SweepAxis::CoherentFraction;
  if (name == "alpha2" || name == "photon_budget") return SweepAxis::PhotonBudget;
  throw InvalidArgument("unknown sweep axis '" + name + "'");
}

void SweepSpec::validate() const {
  disorder.validate();
  input.validate();
  loss.validate();
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  if (values.empty()) throw InvalidArgument("sweep needs at least one axis value");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("axis values must be finite");
  if (input.fed_modes > disorder.channels)
    throw InvalidArgument("fed modes N exceeds channel count M");
  for (double v : values) {
    if (axis == SweepAxis::DisorderS) DisorderParams{disorder.channels, v}.validate();
    setup_for(*this, v);
  }
}

std::vector<FanoSample> run_fano_scatter(const DisorderParams& disorder, double g, double alpha2,
                                         std::size_t trials, std::uint64_t seed,
                                         std::size_t workers) {
  disorder.validate();
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  const auto input = SqueezedInput::aligned(alpha2, g, disorder.channels);
  std::vector<FanoSample> out(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    const std::uint64_t trial_seed = derive_seed(seed, i);
    const auto real = sample_realization(disorder, trial_seed);
    const auto sums = coupling_sums(real);
    FanoSample sample;
    sample.trial = i;
    sample.seed = trial_seed;
    sample.sum_T = sums.sum_T;
    sample.moments = {mean_photon(sums, input), variance_photon(sums, input)};
    sample.fano = fano(sample.moments);
    out[i] = sample;
  });
  return out;
}

EnsembleSummary run_sweep(const SweepSpec& spec) {
  spec.validate();
  EnsembleSummary summary;
  summary.reserve(spec.values.size());

  // Every axis value reuses trial i's realization (common random numbers),
  // except the disorder axis which changes the ensemble itself.
  std::vector<ScatteringRealization> shared;
  if (spec.axis != SweepAxis::DisorderS)
    shared = sample_ensemble(spec.disorder, spec.trials, spec.master_seed, spec.workers);

  for (double value : spec.values) {
    const TrialSetup setup = setup_for(spec, value);
    std::vector<ScatteringRealization> own;
    if (spec.axis == SweepAxis::DisorderS) {
      DisorderParams disorder = spec.disorder;
      disorder.disorder = value;
      own = sample_ensemble(disorder, spec.trials, spec.master_seed, spec.workers);
    }
    const auto& ensemble = spec.axis == SweepAxis::DisorderS ? own : shared;
    std::vector<PhotonMoments> moments(spec.trials);
    parallel_for(spec.trials, spec.workers,
                 [&](std::size_t i) { moments[i] = trial_moments(ensemble[i], setup); });
    summary.push_back(aggregate(value, moments, setup.loss));
  }
  return summary;
}

std::vector<SuperresRow> run_superres_sweep(const SuperresSpec& spec) {
  if (spec.mean_photons.empty()) throw InvalidArgument("superres sweep needs photon numbers");
  for (double n : spec.mean_photons)
    if (!(n > 0.0) || !std::isfinite(n))
      throw InvalidArgument("mean photon numbers must be positive");
  const std::size_t modes =
      spec.modes != 0 ? spec.modes : resolvable_modes(spec.bandwidth, spec.quad_order);
  const auto basis = build_basis(spec.bandwidth, modes, spec.quad_order);

  std::vector<SuperresRow> rows;
  auto emit = [&](double s, double fano_avg) {
    for (double n : spec.mean_photons) {
      SuperresRow row;
      row.s = s;
      row.mean_n = n;
      row.fano = fano_avg;
      row.budget = n / fano_avg;
      const auto rep = superres_factor(basis, row.budget, spec.epsilon);
      row.q = rep.q;
      row.w = rep.w;
      row.w_q = rep.w_q;
      row.j = rep.j;
      rows.push_back(row);
    }
  };

  emit(0.0, 1.0);
  for (double s : spec.s_values) {
    SweepSpec sweep;
    sweep.axis = SweepAxis::DisorderS;
    sweep.values = {s};
    sweep.disorder = {spec.channels, s};
    sweep.input = SqueezedInput::aligned(spec.alpha2, spec.g, spec.channels);
    sweep.trials = spec.trials;
    sweep.master_seed = spec.master_seed;
    sweep.workers = spec.workers;
    emit(s, run_sweep(sweep).front().fano_ratio);
  }
  return rows;
}

std::vector<LossRow> run_loss_sweep(const std::vector<double>& g_values, double s, double alpha2,
                                    const std::vector<double>& loss_grid, std::size_t channels,
                                    std::size_t trials, std::uint64_t seed,
                                    std::size_t workers) {
  if (g_values.empty()) throw InvalidArgument("loss sweep needs at least one g");
  std::vector<LossRow> out;
  for (double g : g_values) {
    SweepSpec spec;
    spec.axis = SweepAxis::LossRate;
    spec.values = loss_grid;
    spec.disorder = {channels, s};
    spec.input = SqueezedInput::aligned(alpha2, g, channels);
    spec.trials = trials;
    spec.master_seed = seed;
    spec.workers = workers;
    for (const auto& row : run_sweep(spec)) out.push_back({g, row});
  }
  return out;
}

std::vector<OracleCase> run_oracle_cases(std::size_t cases, std::uint64_t seed) {
  if (cases == 0) throw InvalidArgument("oracle check needs at least one case");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_m(1, 64);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(b), std::numeric_limits<double>::min());
    return std::abs(a - b) / scale;
  };
  std::vector<OracleCase> out;
  out.reserve(cases);
  for (std::size_t i = 0; i < cases; ++i) {
    OracleCase c;
    c.index = i;
    c.channels = pick_m(rng);
    c.fed_modes = std::uniform_int_distribution<std::size_t>(1, c.channels)(rng);
    c.s = 10.0 - 9.0 * unit(rng);  // (1, 10]
    c.g = 2.0 * unit(rng);
    c.alpha2 = 1e5 * unit(rng);
    const auto real = sample_realization({c.channels, c.s}, derive_seed(seed, i));
    auto input = SqueezedInput::aligned(c.alpha2, c.g, c.fed_modes);
    c.analytic = photon_moments(real, input);
    c.oracle = gaussian_photon_moments(output_gaussian_state(real, input));
    c.rel_err_mean = rel(c.analytic.mean, c.oracle.mean);
    c.rel_err_var = rel(c.analytic.variance, c.oracle.variance);
    out.push_back(c);
  }
  return out;
}

}  // namespace speckle
