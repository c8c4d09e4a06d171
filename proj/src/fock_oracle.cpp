#include "speckle/fock_oracle.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "speckle/errors.hpp"

namespace speckle {

namespace {

using cplx = std::complex<double>;

struct Rotation {
  std::size_t i;
  std::size_t j;
  double angle;
};

/// Dense K-mode tensor with `levels` entries per mode; only states with total
/// photon number below `levels` are populated.
struct FockState {
  std::size_t modes;
  std::size_t levels;
  std::vector<cplx> amp;

  std::size_t stride(std::size_t mode) const {
    std::size_t s = 1;
    for (std::size_t k = 0; k < mode; ++k) s *= levels;
    return s;
  }
};

// Occupation numbers of flat index `idx`.
std::vector<std::size_t> occupations(const FockState& st, std::size_t idx) {
  std::vector<std::size_t> n(st.modes);
  for (std::size_t k = 0; k < st.modes; ++k) {
    n[k] = idx % st.levels;
    idx /= st.levels;
  }
  return n;
}

// exp(angle * (a_i^dag a_j - a_j^dag a_i)) restricted to n_i + n_j = m, in the
// basis |l, m - l> with l photons in mode i.
Eigen::MatrixXd sector_rotation(std::size_t m, double angle) {
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (std::size_t l = 0; l < m; ++l) {
    const double amp = std::sqrt(static_cast<double>((l + 1) * (m - l)));
    gen(l + 1, l) = amp;
    gen(l, l + 1) = -amp;
  }
  return (angle * gen).exp();
}

void apply_rotation(FockState& st, const Rotation& rot) {
  const std::size_t levels = st.levels;
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(levels);
  for (std::size_t m = 0; m < levels; ++m) blocks.push_back(sector_rotation(m, rot.angle));

  const std::size_t stride_i = st.stride(rot.i);
  const std::size_t stride_j = st.stride(rot.j);
  Eigen::VectorXcd v;
  for (std::size_t idx = 0; idx < st.amp.size(); ++idx) {
    const auto n = occupations(st, idx);
    if (n[rot.i] != 0 || n[rot.j] != 0) continue;  // visit each spectator configuration once
    std::size_t rest = 0;
    for (std::size_t k = 0; k < st.modes; ++k) rest += n[k];
    if (rest >= levels) continue;
    for (std::size_t m = 0; m + rest < levels; ++m) {
      v.resize(static_cast<Eigen::Index>(m + 1));
      for (std::size_t l = 0; l <= m; ++l)
        v[static_cast<Eigen::Index>(l)] = st.amp[idx + l * stride_i + (m - l) * stride_j];
      const Eigen::VectorXcd w = blocks[m].cast<cplx>() * v;
      for (std::size_t l = 0; l <= m; ++l)
        st.amp[idx + l * stride_i + (m - l) * stride_j] = w[static_cast<Eigen::Index>(l)];
    }
  }
}

// Real orthogonal matrix with first row `row0` (unit norm) and det +1.
Eigen::MatrixXd complete_orthogonal(const Eigen::VectorXd& row0) {
  const auto k = row0.size();
  Eigen::MatrixXd basis(k, k);
  basis.row(0) = row0.transpose();
  Eigen::Index filled = 1;
  for (Eigen::Index e = 0; e < k && filled < k; ++e) {
    Eigen::VectorXd cand = Eigen::VectorXd::Unit(k, e);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index r = 0; r < filled; ++r)
        cand -= basis.row(r).dot(cand) * basis.row(r).transpose();
    const double nrm = cand.norm();
    if (nrm < 1e-8) continue;
    basis.row(filled++) = (cand / nrm).transpose();
  }
  if (basis.determinant() < 0.0) basis.row(k - 1) *= -1.0;
  return basis;
}

// Rotations whose ordered product (first element leftmost) equals `orth`.
std::vector<Rotation> givens_factors(Eigen::MatrixXd orth) {
  const auto k = orth.rows();
  std::vector<Rotation> reducers;
  for (Eigen::Index col = 0; col + 1 < k; ++col) {
    for (Eigen::Index r = k - 1; r > col; --r) {
      const double a = orth(col, col);
      const double b = orth(r, col);
      const double angle = std::atan2(b, a);
      const double c = std::cos(angle), s = std::sin(angle);
      const Eigen::RowVectorXd top = orth.row(col);
      const Eigen::RowVectorXd bottom = orth.row(r);
      orth.row(col) = c * top + s * bottom;
      orth.row(r) = -s * top + c * bottom;
      reducers.push_back({static_cast<std::size_t>(col), static_cast<std::size_t>(r), angle});
    }
  }
  // G_n ... G_1 O = I, hence O = G_1^{-1} ... G_n^{-1}.
  std::vector<Rotation> factors;
  for (const auto& g : reducers) factors.push_back({g.i, g.j, -g.angle});
  return factors;
}

}  // namespace

std::vector<cplx> squeezed_coherent_amplitudes(const SqueezedInput& input, std::size_t levels) {
  input.validate();
  const double g = input.squeeze;
  const cplx alpha = std::polar(input.alpha_mag, input.alpha_phase);
  const cplx rot = std::polar(1.0, input.squeeze_phase);
  const double ch = std::cosh(g), sh = std::sinh(g), th = std::tanh(g);
  // b = a cosh g + a^dag e^{i phi_s} sinh g has D S|0> as eigenvector with
  // eigenvalue beta, giving a three-term recurrence in n.
  const cplx beta = alpha * ch + std::conj(alpha) * rot * sh;
  std::vector<cplx> c(levels, cplx(0.0, 0.0));
  if (levels == 0) return c;
  c[0] = std::exp(-0.5 * std::norm(alpha) - 0.5 * std::conj(alpha) * std::conj(alpha) * rot * th) /
         std::sqrt(ch);
  for (std::size_t n = 0; n + 1 < levels; ++n) {
    cplx next = beta * c[n];
    if (n > 0) next -= rot * sh * std::sqrt(static_cast<double>(n)) * c[n - 1];
    c[n + 1] = next / (ch * std::sqrt(static_cast<double>(n + 1)));
  }
  return c;
}

ModeCoefficients fed_port_coefficients(const ScatteringRealization& real, std::size_t fed_modes) {
  if (fed_modes == 0 || fed_modes > real.channels())
    throw InvalidArgument("fed modes must lie in [1, M]");
  ModeCoefficients coeffs;
  double tau = 0.0;
  for (std::size_t k = 0; k < fed_modes; ++k) {
    coeffs.c.emplace_back(real.t_amp[k], 0.0);
    tau += real.t_amp[k] * real.t_amp[k];
  }
  const double vacuum_weight = 1.0 - tau;
  if (vacuum_weight > 0.0) coeffs.c.emplace_back(std::sqrt(vacuum_weight), 0.0);
  return coeffs;
}

PhotonMoments fock_photon_moments(const ModeCoefficients& coeffs, const SqueezedInput& input,
                                  std::size_t cutoff) {
  input.validate();
  coeffs.validate(1e-10);
  const std::size_t k = coeffs.c.size();
  if (k > kMaxFockModes)
    throw InvalidArgument("Fock oracle supports at most " + std::to_string(kMaxFockModes) +
                          " modes");
  if (input.fed_modes > k) throw InvalidArgument("more fed modes than coefficient entries");
  if (cutoff < 2 || cutoff > kMaxFockCutoff)
    throw InvalidArgument("Fock cutoff must lie in [2, " + std::to_string(kMaxFockCutoff) + "]");

  const auto fed_amps = squeezed_coherent_amplitudes(input, cutoff);

  FockState st{k, cutoff, {}};
  std::size_t total_size = 1;
  for (std::size_t m = 0; m < k; ++m) total_size *= cutoff;
  st.amp.assign(total_size, cplx(0.0, 0.0));
  double norm2 = 0.0;
  for (std::size_t idx = 0; idx < total_size; ++idx) {
    const auto n = occupations(st, idx);
    std::size_t total = 0;
    cplx a(1.0, 0.0);
    for (std::size_t m = 0; m < k; ++m) {
      total += n[m];
      if (m < input.fed_modes)
        a *= fed_amps[n[m]];
      else if (n[m] != 0)
        a = 0.0;
    }
    if (total >= cutoff) continue;
    st.amp[idx] = a;
    norm2 += std::norm(a);
  }
  const double deficit = 1.0 - norm2;
  if (deficit > 1e-10)
    throw TruncationError("Fock truncation at cutoff " + std::to_string(cutoff) +
                          " discards norm " + std::to_string(deficit));

  // Phase shifts make every weight real and nonnegative; the orthogonal
  // completion of |c| then maps the product state onto the focus mode 0.
  Eigen::VectorXd magnitudes(static_cast<Eigen::Index>(k));
  for (std::size_t m = 0; m < k; ++m) magnitudes[static_cast<Eigen::Index>(m)] = std::abs(coeffs.c[m]);
  magnitudes /= magnitudes.norm();
  for (std::size_t idx = 0; idx < total_size; ++idx) {
    if (st.amp[idx] == cplx(0.0, 0.0)) continue;
    const auto n = occupations(st, idx);
    double phase = 0.0;
    for (std::size_t m = 0; m < k; ++m) phase += std::arg(coeffs.c[m]) * static_cast<double>(n[m]);
    st.amp[idx] *= std::polar(1.0, phase);
  }
  const auto factors = givens_factors(complete_orthogonal(magnitudes));
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) apply_rotation(st, *it);

  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  for (std::size_t idx = 0; idx < total_size; ++idx) {
    const double w = std::norm(st.amp[idx]);
    if (w == 0.0) continue;
    const double n0 = static_cast<double>(idx % cutoff);
    p0 += w;
    p1 += w * n0;
    p2 += w * n0 * n0;
  }
  const double mean = p1 / p0;
  return {mean, p2 / p0 - mean * mean};
}

}  // namespace speckle
