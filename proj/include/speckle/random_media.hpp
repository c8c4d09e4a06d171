#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace speckle {

/// Disorder of the scattering lens: M transmission channels and s = L/l.
struct DisorderParams {
  std::size_t channels = 50;
  double disorder = 2.0;

  /// Throws InvalidArgument unless channels >= 1 and disorder > 1.
  void validate() const;
};

/// Coefficients coupling every input port to the single focus mode.
///
/// One transmission and one reflection coefficient per channel. Amplitudes
/// satisfy sum(t_amp^2) + sum(r_amp^2) = 1. Shaped propagation only ever uses
/// t_amp; the phases are kept for unshaped diagnostics.
struct ScatteringRealization {
  std::vector<double> t_amp;
  std::vector<double> t_phase;
  std::vector<double> r_amp;
  std::vector<double> r_phase;

  std::size_t channels() const { return t_amp.size(); }

  /// Builds a realization with zero phases. Throws InvalidArgument if the
  /// vectors differ in length, contain negative entries, or violate flux
  /// conservation by more than 1e-12.
  static ScatteringRealization from_amplitudes(std::vector<double> t_amp,
                                               std::vector<double> r_amp);
};

/// Shaped coupling sums entering the photon statistics.
struct CouplingSums {
  double sum_T = 0.0;      ///< sum of |t|^2
  double sum_abs_t = 0.0;  ///< sum of |t|
  double sum_R = 0.0;      ///< sum of |r|^2
  /// prefix_T[n] = sum over the first n channels of |t|^2; size M + 1.
  std::vector<double> prefix_T;
  std::vector<double> prefix_abs_t;

  std::size_t channels() const { return prefix_T.empty() ? 0 : prefix_T.size() - 1; }
  double partial_sum_T(std::size_t n) const;
  double partial_sum_abs_t(std::size_t n) const;
};

struct CouplingStats {
  double mean_T = 0.0;
  double stderr_T = 0.0;
  double mean_R = 0.0;
  double stderr_R = 0.0;
  std::size_t trials = 0;
};

/// Stateless 64-bit mix of (master seed, stream index); serial and parallel
/// consumers derive identical per-trial seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Draws one realization. Deterministic in (params, seed).
ScatteringRealization sample_realization(const DisorderParams& params, std::uint64_t seed);

CouplingSums coupling_sums(const ScatteringRealization& real);

/// Mean and standard error of sum_T and sum_R over `trials` realizations
/// seeded by derive_seed(seed, i).
CouplingStats ensemble_coupling_stats(const DisorderParams& params, std::size_t trials,
                                      std::uint64_t seed);

}  // namespace speckle
