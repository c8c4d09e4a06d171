#pragma once

#include <cstddef>

#include "speckle/random_media.hpp"

namespace speckle {

/// Product input [D(alpha) S(zeta) |0>]^{(x) N} on the first N transmission
/// ports; every other port carries vacuum.
struct SqueezedInput {
  double alpha_mag = 100.0;     ///< |alpha|
  double alpha_phase = 0.0;     ///< phi_alpha, radians
  double squeeze = 1.5;         ///< g
  double squeeze_phase = 0.0;   ///< phi_s, radians
  std::size_t fed_modes = 50;   ///< N

  double alpha2() const { return alpha_mag * alpha_mag; }
  void validate() const;
  static SqueezedInput aligned(double alpha2, double squeeze, std::size_t fed_modes);
};

struct PhotonMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Beam splitter with vacuum in the unused port; loss_rate = |q|^2.
struct LossChannel {
  double loss_rate = 0.0;

  double transmittance() const { return 1.0 - loss_rate; }
  void validate() const;
};

/// Exact mean photon number of the shaped focus for full filling (N = M).
double mean_photon(const CouplingSums& sums, const SqueezedInput& input);

/// Exact variance for full filling. Throws NonzeroPhase unless both phases
/// are zero.
double variance_photon(const CouplingSums& sums, const SqueezedInput& input);

/// Mean photon number when only the first N channels carry the input.
double mean_photon_partial(const ScatteringRealization& real, const SqueezedInput& input);

/// Variance for 1 <= N <= M, including the squeezed-vacuum cross term
/// between fed and empty transmission ports.
double variance_photon_partial(const ScatteringRealization& real, const SqueezedInput& input);

/// Both moments for any N (dispatches to the partial forms).
PhotonMoments photon_moments(const ScatteringRealization& real, const SqueezedInput& input);

/// Large-|alpha| approximations: mean ~ |alpha|^2 (sum|t|)^2 and
/// variance ~ mean * [1 - sum T (1 - e^{-2g})]. For comparison with the large-alpha envelope.
PhotonMoments photon_moments_large_alpha(const ScatteringRealization& real,
                                         const SqueezedInput& input);

double fano(const PhotonMoments& m);
double snr(const PhotonMoments& m);

/// Ensemble-averaged Fano factor in the large-|alpha| limit, 1 - (1 - e^{-2g})/s.
double asymptotic_avg_fano(double s, double g);
double asymptotic_avg_snr_ratio(double s, double g);

/// mean' = |p|^2 mean, var' = |p|^4 var + |p|^2 |q|^2 mean.
PhotonMoments apply_loss(const PhotonMoments& m, const LossChannel& loss);

/// Photons delivered to the focus: P * t * fraction * lambda / (h c).
double photon_budget(double wavelength_m, double power_w, double duration_s,
                     double focus_fraction);

}  // namespace speckle
