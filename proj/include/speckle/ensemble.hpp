#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "speckle/quantum_stats.hpp"
#include "speckle/random_media.hpp"

namespace speckle {

enum class SweepAxis {
  SqueezeG,          ///< g
  DisorderS,         ///< s
  ModeFillRatio,     ///< N / M (N rounded to the nearest integer)
  LossRate,          ///< |q|^2
  CoherentFraction,  ///< |alpha|^2 / (|alpha|^2 + sinh^2 g)
  PhotonBudget,      ///< |alpha|^2 per fed mode
};

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

enum class Formula { Exact, LargeAlpha };

struct SweepSpec {
  SweepAxis axis = SweepAxis::SqueezeG;
  std::vector<double> values;
  DisorderParams disorder;
  SqueezedInput input = SqueezedInput::aligned(10000.0, 1.5, 50);
  LossChannel loss;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
  Formula formula = Formula::Exact;

  void validate() const;
};

/// Aggregate over the disorder ensemble at one axis value.
///
/// fano_ratio is the ensemble average of the per-trial Fano factor and
/// snr_ratio = 1 / fano_ratio is the average SNR over the mean photon number.
/// fano_of_means (mean variance over mean photon number) is kept as a
/// diagnostic.
struct SweepRow {
  double axis_value = 0.0;
  double mean_n = 0.0;
  double mean_variance = 0.0;
  double fano_ratio = 0.0;
  double stderr_fano = 0.0;
  double snr_ratio = 0.0;
  double stderr_snr = 0.0;
  double stderr_mean_n = 0.0;
  double fano_of_means = 0.0;
  std::size_t trials = 0;
};

using EnsembleSummary = std::vector<SweepRow>;

/// Per-trial record of a full-filling (N = M) run.
struct FanoSample {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double sum_T = 0.0;
  PhotonMoments moments;
  double fano = 0.0;
};

/// Per-trial exact Fano factors, trial i seeded by derive_seed(seed, i).
std::vector<FanoSample> run_fano_scatter(const DisorderParams& disorder, double g, double alpha2,
                                         std::size_t trials, std::uint64_t seed,
                                         std::size_t workers = 1);

/// Deterministic in the spec; independent of the worker count.
EnsembleSummary run_sweep(const SweepSpec& spec);

struct SuperresRow {
  double s = 0.0;  ///< 0 marks the coherent baseline
  double mean_n = 0.0;
  double fano = 1.0;
  double budget = 0.0;  ///< illumination SNR fed to the prolate reconstruction
  std::size_t q = 0;
  double w = 0.0;
  double w_q = 0.0;
  double j = 0.0;
};

struct SuperresSpec {
  double g = 1.5;
  std::vector<double> s_values{2.0, 4.0, 6.0, 8.0};
  std::vector<double> mean_photons;
  double alpha2 = 10000.0;
  std::size_t channels = 50;
  double bandwidth = 1.0;
  double epsilon = 0.01;
  std::size_t modes = 0;  ///< 0 picks every resolvable mode
  std::size_t quad_order = 256;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
};

/// J versus mean photon number: the coherent baseline uses S = <n>, each
/// squeezed curve S = <n> / F with F the ensemble-averaged Fano factor at s.
/// Coherent rows come first, then one block per s.
std::vector<SuperresRow> run_superres_sweep(const SuperresSpec& spec);

struct LossRow {
  double g = 0.0;
  SweepRow row;
};

/// Average SNR ratio under photon loss for every (g, |q|^2) pair.
std::vector<LossRow> run_loss_sweep(const std::vector<double>& g_values, double s, double alpha2,
                                    const std::vector<double>& loss_grid, std::size_t channels,
                                    std::size_t trials, std::uint64_t seed,
                                    std::size_t workers = 1);

/// One random analytic-versus-Gaussian comparison with phases zero.
struct OracleCase {
  std::size_t index = 0;
  std::size_t channels = 0;
  std::size_t fed_modes = 0;
  double s = 0.0;
  double g = 0.0;
  double alpha2 = 0.0;
  PhotonMoments analytic;
  PhotonMoments oracle;
  double rel_err_mean = 0.0;
  double rel_err_var = 0.0;
};

/// Draws M in {1..64}, N in {1..M}, s in (1, 10], g in [0, 2] and
/// |alpha|^2 in [0, 1e5] per case and compares both moment engines.
std::vector<OracleCase> run_oracle_cases(std::size_t cases, std::uint64_t seed);

}  // namespace speckle
