#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "speckle/quantum_stats.hpp"
#include "speckle/random_media.hpp"

namespace speckle {

/// Single-mode Gaussian state in the convention x = (a + a^dag)/sqrt(2),
/// p = (a - a^dag)/(i sqrt(2)); vacuum has mean 0 and covariance I/2.
///
/// The covariance is stored as its excess over vacuum noise, V - I/2, so
/// that weakly squeezed states keep full relative precision.
struct GaussianModeState {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d excess = Eigen::Matrix2d::Zero();

  Eigen::Matrix2d cov() const { return excess + 0.5 * Eigen::Matrix2d::Identity(); }

  static GaussianModeState vacuum() { return {}; }
  static GaussianModeState from_covariance(const Eigen::Vector2d& mean,
                                           const Eigen::Matrix2d& cov);
  /// D(alpha) S(zeta) |0> with zeta = g e^{i phi_s}; the squeezed quadrature
  /// lies at angle phi_s / 2 in the (x, p) plane.
  static GaussianModeState squeezed_coherent(const SqueezedInput& input);
};

/// Weights c_k of the input modes composing the focus mode, b = sum c_k a_k.
struct ModeCoefficients {
  std::vector<std::complex<double>> c;

  double norm2() const;
  /// Throws InvalidArgument if sum |c_k|^2 deviates from 1 by more than tol.
  void validate(double tol = 1e-12) const;
};

/// Focus mode of independent Gaussian inputs mixed with weights `coeffs`.
GaussianModeState combine_modes(const ModeCoefficients& coeffs,
                                const std::vector<GaussianModeState>& inputs);

/// Focus-mode weights of the shaped relation: |t_k| for transmission ports,
/// complex r_k for reflection ports (transmission first, then reflection).
ModeCoefficients shaped_coefficients(const ScatteringRealization& real);

/// Exact Gaussian state of the shaped focus; ports beyond input.fed_modes and
/// all reflection ports carry vacuum. Phases are arbitrary.
GaussianModeState output_gaussian_state(const ScatteringRealization& real,
                                        const SqueezedInput& input);

/// Throws UnphysicalState when det(cov) < 1/4 - tol.
PhotonMoments gaussian_photon_moments(const GaussianModeState& state);

/// Mixes the state with vacuum on a beam splitter of transmittance 1 - loss_rate.
GaussianModeState attenuate(const GaussianModeState& state, const LossChannel& loss);

}  // namespace speckle
