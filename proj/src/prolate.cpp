#include "speckle/prolate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "speckle/errors.hpp"

namespace speckle {

namespace {

using real_t = long double;
using MatrixL = Eigen::Matrix<real_t, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<real_t, Eigen::Dynamic, 1>;

constexpr real_t kPiL = 3.141592653589793238462643383279502884L;
constexpr double kConvergenceTol = 1e-9;

real_t sinc_kernel(real_t c, real_t d) {
  if (d == 0.0L) return c / kPiL;
  return std::sin(c * d) / (kPiL * d);
}

struct ParityBlock {
  bool odd;
  MatrixL matrix;
};

// Even/odd reduction of the symmetrized Nystrom matrix sqrt(w_i) K sqrt(w_j)
// over the positive half of a symmetric grid.
ParityBlock parity_block(real_t c, const std::vector<real_t>& half_nodes,
                         const std::vector<real_t>& half_weights, bool odd) {
  const auto h = static_cast<Eigen::Index>(half_nodes.size());
  MatrixL a(h, h);
  const real_t sign = odd ? -1.0L : 1.0L;
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const real_t zi = half_nodes[i], zj = half_nodes[j];
      const real_t v = std::sqrt(half_weights[i] * half_weights[j]) *
                       (sinc_kernel(c, zi - zj) + sign * sinc_kernel(c, zi + zj));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return {odd, std::move(a)};
}

void split_half(std::size_t order, std::vector<real_t>& half_nodes,
                std::vector<real_t>& half_weights) {
  std::vector<real_t> nodes, weights;
  gauss_legendre(order, nodes, weights);
  const std::size_t h = order / 2;
  half_nodes.assign(nodes.begin() + static_cast<std::ptrdiff_t>(h), nodes.end());
  half_weights.assign(weights.begin() + static_cast<std::ptrdiff_t>(h), weights.end());
}

std::vector<real_t> all_eigenvalues(real_t c, std::size_t order) {
  std::vector<real_t> half_nodes, half_weights;
  split_half(order, half_nodes, half_weights);
  std::vector<real_t> out;
  for (bool odd : {false, true}) {
    const auto block = parity_block(c, half_nodes, half_weights, odd);
    Eigen::SelfAdjointEigenSolver<MatrixL> solver(block.matrix, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      out.push_back(solver.eigenvalues()[i]);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// Eigenvectors of the differential operator commuting with the sinc kernel,
// expanded in normalized Legendre polynomials sqrt(n + 1/2) P_n. Only degrees
// of one parity couple, giving a symmetric tridiagonal matrix whose
// eigenvalues are well separated, so the functions come out accurate to
// rounding even where the kernel eigenvalue is tiny. Returned coefficients
// multiply plain P_n, ordered by increasing operator eigenvalue.
std::vector<std::vector<real_t>> legendre_expansions(real_t c, std::size_t terms, bool odd,
                                                     std::size_t count) {
  const std::size_t first = odd ? 1 : 0;
  const auto m = static_cast<Eigen::Index>((terms - first + 1) / 2);
  MatrixL a = MatrixL::Zero(m, m);
  const real_t c2 = c * c;
  for (Eigen::Index i = 0; i < m; ++i) {
    const real_t n = static_cast<real_t>(first + 2 * static_cast<std::size_t>(i));
    a(i, i) = n * (n + 1.0L) + c2 * (2.0L * n * (n + 1.0L) - 1.0L) / ((2.0L * n + 3.0L) * (2.0L * n - 1.0L));
    if (i + 1 < m) {
      const real_t off = c2 * (n + 2.0L) * (n + 1.0L) /
                         ((2.0L * n + 3.0L) * std::sqrt((2.0L * n + 1.0L) * (2.0L * n + 5.0L)));
      a(i, i + 1) = off;
      a(i + 1, i) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixL> solver(a);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("Legendre eigensolver failed to converge");
  std::vector<std::vector<real_t>> out;
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<real_t> coef(terms, 0.0L);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t n = first + 2 * static_cast<std::size_t>(i);
      coef[n] = solver.eigenvectors()(i, static_cast<Eigen::Index>(j)) *
                std::sqrt(static_cast<real_t>(n) + 0.5L);
    }
    out.push_back(std::move(coef));
  }
  return out;
}

real_t legendre_series(const std::vector<real_t>& coef, real_t x) {
  real_t b1 = 0.0L, b2 = 0.0L;
  for (std::size_t n = coef.size(); n-- > 0;) {
    const real_t alpha = (2.0L * n + 1.0L) * x / static_cast<real_t>(n + 1);
    const real_t beta = static_cast<real_t>(n + 1) / static_cast<real_t>(n + 2);
    const real_t b0 = coef[n] + alpha * b1 - beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

void validate_request(double c, std::size_t modes, std::size_t quad_order) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("bandwidth c must be positive");
  if (quad_order < 8 || quad_order % 2 != 0)
    throw InvalidArgument("quadrature order must be even and >= 8");
  if (modes == 0 || modes > quad_order / 4)
    throw InvalidArgument("mode count must lie in [1, quad_order / 4] = [1, " +
                          std::to_string(quad_order / 4) + "]");
}

}  // namespace

void gauss_legendre(std::size_t order, std::vector<long double>& nodes,
                    std::vector<long double>& weights) {
  if (order == 0) throw InvalidArgument("quadrature order must be positive");
  nodes.assign(order, 0.0L);
  weights.assign(order, 0.0L);
  const real_t n = static_cast<real_t>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    // Tricomi initial guess for the i-th largest root, then Newton.
    real_t x = std::cos(kPiL * (static_cast<real_t>(i) + 0.75L) / (n + 0.5L));
    real_t dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      real_t p0 = 1.0L, p1 = x;
      for (std::size_t l = 1; l < order; ++l) {
        const real_t p2 = ((2.0L * l + 1.0L) * x * p1 - static_cast<real_t>(l) * p0) /
                          static_cast<real_t>(l + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const real_t dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4.0L * std::numeric_limits<real_t>::epsilon()) {
        // one more evaluation for a consistent derivative at the final x
        p0 = 1.0L;
        p1 = x;
        for (std::size_t l = 1; l < order; ++l) {
          const real_t p2 = ((2.0L * l + 1.0L) * x * p1 - static_cast<real_t>(l) * p0) /
                            static_cast<real_t>(l + 1);
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0L);
        break;
      }
    }
    const real_t w = 2.0L / ((1.0L - x * x) * dp * dp);
    nodes[order - 1 - i] = x;
    nodes[i] = -x;
    weights[order - 1 - i] = w;
    weights[i] = w;
  }
  if (order % 2 == 1) nodes[order / 2] = 0.0L;
}

double ProlateBasis::eval(std::size_t k, double z) const {
  if (std::abs(z) > 1.0) return 0.0;
  return static_cast<double>(legendre_series(legendre_.at(k), z));
}

double ProlateBasis::at_origin(std::size_t k) const {
  if (k >= size()) throw InvalidArgument("prolate index out of range");
  if (k % 2 == 1) return 0.0;
  return eval(k, 0.0);
}

ProlateBasis build_basis(double c, std::size_t modes, std::size_t quad_order) {
  validate_request(c, modes, quad_order);
  const real_t cl = c;

  std::vector<real_t> half_nodes, half_weights;
  split_half(quad_order, half_nodes, half_weights);
  const std::size_t h = half_nodes.size();

  struct Pair {
    real_t lambda;
    bool odd;
    VectorL half;  // unit-norm eigenvector on the half grid
  };
  std::vector<Pair> pairs;
  for (bool odd : {false, true}) {
    const auto block = parity_block(cl, half_nodes, half_weights, odd);
    Eigen::SelfAdjointEigenSolver<MatrixL> solver(block.matrix);
    if (solver.info() != Eigen::Success)
      throw ConvergenceError("symmetric eigensolver failed to converge");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      pairs.push_back({solver.eigenvalues()[i], odd, solver.eigenvectors().col(i)});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.lambda > b.lambda; });
  pairs.resize(modes);

  for (std::size_t k = 0; k < modes; ++k) {
    const real_t lam = pairs[k].lambda;
    if (!(lam > 0.0L && lam < 1.0L) || (k > 0 && !(lam < pairs[k - 1].lambda)))
      throw ConvergenceError("eigenvalue lambda_" + std::to_string(k) + " = " +
                             std::to_string(static_cast<double>(lam)) +
                             " is below the resolvable precision; reduce the mode count");
    if (pairs[k].odd != (k % 2 == 1))
      throw ConvergenceError("eigenvalue ordering broke the alternating parity at k = " +
                             std::to_string(k));
  }

  const auto refined = all_eigenvalues(cl, 2 * quad_order);
  for (std::size_t k = 0; k < modes; ++k) {
    const real_t shift = std::abs(refined[k] - pairs[k].lambda);
    if (shift > kConvergenceTol)
      throw ConvergenceError("lambda_" + std::to_string(k) + " shifted by " +
                             std::to_string(static_cast<double>(shift)) +
                             " under quadrature doubling");
  }

  ProlateBasis basis;
  basis.c_ = c;
  basis.nodes_.resize(2 * h);
  basis.weights_.resize(2 * h);
  for (std::size_t i = 0; i < h; ++i) {
    basis.nodes_[h + i] = static_cast<double>(half_nodes[i]);
    basis.nodes_[h - 1 - i] = -static_cast<double>(half_nodes[i]);
    basis.weights_[h + i] = static_cast<double>(half_weights[i]);
    basis.weights_[h - 1 - i] = static_cast<double>(half_weights[i]);
  }

  const std::size_t terms = quad_order / 2;
  const std::size_t per_parity = (modes + 1) / 2;
  const auto even_fns = legendre_expansions(cl, terms, false, per_parity);
  const auto odd_fns = legendre_expansions(cl, terms, true, per_parity);
  for (std::size_t k = 0; k < modes; ++k) {
    auto& pair = pairs[k];
    auto coef = (pair.odd ? odd_fns : even_fns)[k / 2];
    // Sign convention: positive value (even) or slope (odd) next to the origin.
    if (legendre_series(coef, half_nodes[0]) < 0.0L)
      for (auto& x : coef) x = -x;
    if (pair.half[0] < 0.0L) pair.half = -pair.half;
    const real_t parity = pair.odd ? -1.0L : 1.0L;

    // The Nystrom eigenvector must describe the same function; its rounding
    // error grows like eps / lambda_k.
    const real_t tol = 1e-12L + 1e3L * std::numeric_limits<real_t>::epsilon() / pair.lambda;
    std::vector<double> samples(2 * h);
    for (std::size_t i = 0; i < h; ++i) {
      const real_t phi = legendre_series(coef, half_nodes[i]);
      const real_t nystrom = pair.half[static_cast<Eigen::Index>(i)] / std::sqrt(2.0L * half_weights[i]);
      if (std::abs(phi - nystrom) > tol)
        throw ConvergenceError("eigenfunction " + std::to_string(k) +
                               " disagrees between the Nystrom and Legendre solutions");
      samples[h + i] = static_cast<double>(phi);
      samples[h - 1 - i] = static_cast<double>(parity * phi);
    }

    basis.lambda_.push_back(static_cast<double>(pair.lambda));
    basis.phi_.push_back(std::move(samples));
    basis.legendre_.emplace_back(coef.begin(), coef.end());
  }
  return basis;
}

std::size_t resolvable_modes(double c, std::size_t quad_order, double floor) {
  validate_request(c, 1, quad_order);
  const auto eig = all_eigenvalues(c, quad_order);
  std::size_t count = 0;
  while (count < eig.size() && count < quad_order / 4 && eig[count] > floor) ++count;
  return count;
}

double classical_psf(double c, double z) {
  if (z == 0.0) return c / std::numbers::pi;
  return std::sin(c * z) / (std::numbers::pi * z);
}

double reconstruction_psf(const ProlateBasis& basis, std::size_t q, double z) {
  if (q == 0 || q > basis.size())
    throw InvalidArgument("Q must lie in [1, " + std::to_string(basis.size()) + "]");
  if (std::abs(z) > 1.0) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < q; k += 2) total += basis.at_origin(k) * basis.eval(k, z);
  return total;
}

PsfCurve sample_curve(std::function<double(double)> profile, double extent, double step) {
  if (!(extent > 0.0) || !(step > 0.0)) throw InvalidArgument("extent and step must be positive");
  PsfCurve curve;
  const auto count = static_cast<std::size_t>(std::ceil(extent / step - 1e-9));
  curve.z.reserve(count + 1);
  curve.values.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const double z = static_cast<double>(i) * step;
    curve.z.push_back(z);
    curve.values.push_back(profile(z));
  }
  curve.profile = std::move(profile);
  return curve;
}

PsfCurve classical_curve(double c, double step) {
  if (!(c > 0.0)) throw InvalidArgument("bandwidth c must be positive");
  // the main lobe ends at pi / c
  return sample_curve([c](double z) { return classical_psf(c, z); },
                      1.25 * std::numbers::pi / c, step);
}

PsfCurve reconstruction_curve(const ProlateBasis& basis, std::size_t q, double step) {
  if (q == 0 || q > basis.size())
    throw InvalidArgument("Q must lie in [1, " + std::to_string(basis.size()) + "]");
  return sample_curve([&basis, q](double z) { return reconstruction_psf(basis, q, z); }, 1.5,
                      step);
}

double half_width(const PsfCurve& curve) {
  if (curve.values.empty() || curve.z.size() != curve.values.size())
    throw InvalidArgument("curve has no samples");
  const double peak = curve.peak();
  if (!(peak > 0.0)) throw InvalidArgument("curve must have a positive peak at z = 0");
  const double half = 0.5 * peak;
  for (std::size_t i = 1; i < curve.values.size(); ++i) {
    if (curve.values[i] == half) return curve.z[i];
    if (curve.values[i] > half) continue;
    double lo = curve.z[i - 1], hi = curve.z[i];
    if (!curve.profile) {
      const double f_lo = curve.values[i - 1], f_hi = curve.values[i];
      return lo + (f_lo - half) / (f_lo - f_hi) * (hi - lo);
    }
    while (hi - lo > 1e-7) {
      const double mid = 0.5 * (lo + hi);
      if (curve.profile(mid) >= half)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  throw NoCrossing();
}

std::vector<double> point_object_coeffs(const ProlateBasis& basis, double budget, double epsilon) {
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw InvalidArgument("photon budget must be finite and >= 0");
  if (!(epsilon > 0.0 && epsilon <= 2.0))
    throw InvalidArgument("object width epsilon must lie in (0, 2]");
  const double amplitude = std::sqrt(budget * epsilon);
  std::vector<double> a(basis.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = amplitude * basis.at_origin(k);
  return a;
}

double reconstruction_snr(const ProlateBasis& basis, const std::vector<double>& coeffs,
                          std::size_t q) {
  if (q == 0 || q > basis.size() || q > coeffs.size())
    throw InvalidArgument("Q out of range for the basis or coefficient vector");
  double energy = 0.0, noise = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    const double a2 = coeffs[k] * coeffs[k];
    energy += a2;
    noise += a2 / basis.lambda(k);
  }
  if (energy == 0.0) throw AllZero();
  return energy * energy / noise;
}

std::size_t choose_q(const ProlateBasis& basis, const std::vector<double>& coeffs) {
  if (coeffs.empty() || coeffs.size() > basis.size())
    throw InvalidArgument("coefficient vector does not match the basis");
  const double first = coeffs[0] == 0.0 ? 0.0 : reconstruction_snr(basis, coeffs, 1);
  if (first < 1.0) throw TooDim(first);
  std::size_t best = 1;
  for (std::size_t q = 2; q <= coeffs.size(); ++q)
    if (reconstruction_snr(basis, coeffs, q) >= 1.0) best = q;
  return best;
}

ReconstructionReport resolution_report(const ProlateBasis& basis, std::size_t q) {
  ReconstructionReport rep;
  rep.q = q;
  rep.w = half_width(classical_curve(basis.bandwidth()));
  rep.w_q = half_width(reconstruction_curve(basis, q));
  rep.j = rep.w / rep.w_q;
  rep.snr_r = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

ReconstructionReport superres_factor(const ProlateBasis& basis, double budget, double epsilon) {
  const auto coeffs = point_object_coeffs(basis, budget, epsilon);
  const std::size_t q = choose_q(basis, coeffs);
  auto rep = resolution_report(basis, q);
  rep.snr_r = reconstruction_snr(basis, coeffs, q);
  return rep;
}

}  // namespace speckle
