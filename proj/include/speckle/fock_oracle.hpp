#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "speckle/gaussian_oracle.hpp"
#include "speckle/quantum_stats.hpp"

namespace speckle {

inline constexpr std::size_t kMaxFockModes = 3;
inline constexpr std::size_t kMaxFockCutoff = 256;

/// Fock amplitudes <n|D(alpha) S(zeta)|0> for n < levels.
std::vector<std::complex<double>> squeezed_coherent_amplitudes(const SqueezedInput& input,
                                                               std::size_t levels);

/// Focus weights with every vacuum port merged into one mode:
/// (|t_1|, ..., |t_N|, sqrt(1 - sum_{k<=N} T)). Drops the merged mode when
/// its weight is zero.
ModeCoefficients fed_port_coefficients(const ScatteringRealization& real, std::size_t fed_modes);

/// Brute-force photon moments of the focus mode in a truncated Fock space.
///
/// The first input.fed_modes of the K = coeffs.c.size() <= 3 modes carry
/// D(alpha)S(zeta)|0>, the rest vacuum. The coefficient row is completed to a
/// unitary by Gram-Schmidt, decomposed into phase shifts and two-mode
/// rotations, and applied to the product state. Basis states have total photon
/// number below `cutoff` (passive optics conserves it, so no further
/// truncation occurs). Throws TruncationError when the input state loses more
/// than 1e-10 of its norm to the truncation.
PhotonMoments fock_photon_moments(const ModeCoefficients& coeffs, const SqueezedInput& input,
                                  std::size_t cutoff);

}  // namespace speckle
