#include "speckle/gaussian_oracle.hpp"

#include <cmath>
#include <string>

#include "speckle/errors.hpp"

namespace speckle {

namespace {

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace

GaussianModeState GaussianModeState::squeezed_coherent(const SqueezedInput& input) {
  input.validate();
  const std::complex<double> alpha = std::polar(input.alpha_mag, input.alpha_phase);
  GaussianModeState st;
  st.mean << std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag();
  const Eigen::Vector2d diag(std::expm1(-2.0 * input.squeeze), std::expm1(2.0 * input.squeeze));
  const Eigen::Matrix2d r = rotation(0.5 * input.squeeze_phase);
  st.excess = r * (0.5 * diag).asDiagonal() * r.transpose();
  return st;
}

GaussianModeState GaussianModeState::from_covariance(const Eigen::Vector2d& mean,
                                                     const Eigen::Matrix2d& cov) {
  GaussianModeState st;
  st.mean = mean;
  st.excess = cov - 0.5 * Eigen::Matrix2d::Identity();
  return st;
}

double ModeCoefficients::norm2() const {
  double total = 0.0;
  for (const auto& w : c) total += std::norm(w);
  return total;
}

void ModeCoefficients::validate(double tol) const {
  if (c.empty()) throw InvalidArgument("mode coefficients are empty");
  const double n2 = norm2();
  if (std::abs(n2 - 1.0) > tol)
    throw InvalidArgument("focus mode is not normalized: sum |c|^2 = " + std::to_string(n2));
}

GaussianModeState combine_modes(const ModeCoefficients& coeffs,
                                const std::vector<GaussianModeState>& inputs) {
  if (coeffs.c.size() != inputs.size())
    throw InvalidArgument("coefficient count does not match input mode count");
  // Vacuum inputs contribute zero excess, so the vacuum filling any deficit
  // in sum |c|^2 needs no explicit term.
  GaussianModeState out;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const double weight = std::abs(coeffs.c[k]);
    if (weight == 0.0) continue;
    // c_k a_k = |c_k| e^{i theta} a_k rotates the (x, p) plane by theta.
    const Eigen::Matrix2d r = rotation(std::arg(coeffs.c[k]));
    out.mean += weight * r * inputs[k].mean;
    out.excess += weight * weight * r * inputs[k].excess * r.transpose();
  }
  return out;
}

ModeCoefficients shaped_coefficients(const ScatteringRealization& real) {
  ModeCoefficients coeffs;
  coeffs.c.reserve(2 * real.channels());
  for (double a : real.t_amp) coeffs.c.emplace_back(a, 0.0);
  for (std::size_t k = 0; k < real.r_amp.size(); ++k)
    coeffs.c.push_back(std::polar(real.r_amp[k], real.r_phase[k]));
  return coeffs;
}

GaussianModeState output_gaussian_state(const ScatteringRealization& real,
                                        const SqueezedInput& input) {
  input.validate();
  const std::size_t m = real.channels();
  if (input.fed_modes > m || real.r_amp.size() != m || real.r_phase.size() != m)
    throw InvalidArgument("inconsistent dimensions between realization and input");
  const auto coeffs = shaped_coefficients(real);
  std::vector<GaussianModeState> inputs(coeffs.c.size(), GaussianModeState::vacuum());
  const auto fed = GaussianModeState::squeezed_coherent(input);
  for (std::size_t k = 0; k < input.fed_modes; ++k) inputs[k] = fed;
  return combine_modes(coeffs, inputs);
}

PhotonMoments gaussian_photon_moments(const GaussianModeState& state) {
  const Eigen::Matrix2d& e = state.excess;
  if (std::abs(e(0, 1) - e(1, 0)) > 1e-12 * (1.0 + e.norm()))
    throw UnphysicalState("covariance matrix is not symmetric");
  // det V - 1/4 = tr(E)/2 + det E
  const double det_excess = 0.5 * e.trace() + e.determinant();
  if (det_excess < -1e-10 * (1.0 + e.squaredNorm()))
    throw UnphysicalState("covariance violates uncertainty bound: det V - 1/4 = " +
                          std::to_string(det_excess));
  const Eigen::Vector2d& d = state.mean;
  PhotonMoments m;
  // <n> = (tr V - 1)/2 + |d|^2/2 and Var n = (tr V^2 - 1/2)/2 + d.V.d with
  // V = I/2 + E expanded so that no vacuum offset is subtracted.
  m.mean = 0.5 * e.trace() + 0.5 * d.squaredNorm();
  m.variance = 0.5 * (e.trace() + (e * e).trace()) + 0.5 * d.squaredNorm() + d.dot(e * d);
  return m;
}

GaussianModeState attenuate(const GaussianModeState& state, const LossChannel& loss) {
  loss.validate();
  const double p2 = loss.transmittance();
  GaussianModeState out;
  out.mean = std::sqrt(p2) * state.mean;
  out.excess = p2 * state.excess;
  return out;
}

}  // namespace speckle
