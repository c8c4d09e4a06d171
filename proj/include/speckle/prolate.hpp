#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace speckle {

/// Eigenpairs of the finite-Fourier kernel sin(c(z - z'))/(pi (z - z')) on
/// [-1, 1], sampled on a Gauss-Legendre grid.
///
/// phi[k][i] is phi_k at nodes[i], normalized so that the quadrature norm
/// sum_i weights[i] phi_k(z_i)^2 is one. phi_k has parity (-1)^k, phi_k(0) > 0
/// for even k and phi_k'(0) > 0 for odd k. The functions themselves come from
/// the Legendre expansion of the commuting differential operator (checked
/// against the Nystrom eigenvectors); they vanish outside [-1, 1].
class ProlateBasis {
 public:
  double bandwidth() const { return c_; }
  std::size_t size() const { return lambda_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& lambda() const { return lambda_; }
  double lambda(std::size_t k) const { return lambda_.at(k); }
  const std::vector<double>& samples(std::size_t k) const { return phi_.at(k); }

  double eval(std::size_t k, double z) const;
  /// phi_k(0); exactly zero for odd k.
  double at_origin(std::size_t k) const;

 private:
  friend ProlateBasis build_basis(double c, std::size_t modes, std::size_t quad_order);

  double c_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> lambda_;
  std::vector<std::vector<double>> phi_;
  std::vector<std::vector<long double>> legendre_;  // P_n coefficients per mode
};

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
void gauss_legendre(std::size_t order, std::vector<long double>& nodes,
                    std::vector<long double>& weights);

/// Nystrom discretization of the sinc kernel with `quad_order` nodes. Requires
/// c > 0, even quad_order and 1 <= modes <= quad_order / 4. Throws
/// ConvergenceError if any retained eigenvalue moves by more than 1e-9 when the
/// quadrature is doubled, or is not resolvable (outside (0, 1) or out of order).
ProlateBasis build_basis(double c, std::size_t modes, std::size_t quad_order = 256);

/// Number of kernel eigenvalues above `floor` (capped at quad_order / 4).
std::size_t resolvable_modes(double c, std::size_t quad_order = 256, double floor = 1e-14);

/// sin(c z)/(pi z) with the limit c/pi at z = 0.
double classical_psf(double c, double z);

/// sum_{k<Q} phi_k(0) phi_k(z): the reconstruction PSF of a source at the origin.
double reconstruction_psf(const ProlateBasis& basis, std::size_t q, double z);

/// A PSF profile on z >= 0 together with its samples.
struct PsfCurve {
  std::vector<double> z;
  std::vector<double> values;
  std::function<double(double)> profile;  ///< exact evaluator, may be empty

  double peak() const { return values.empty() ? 0.0 : values.front(); }
};

/// Samples `profile` on [0, extent] with spacing `step`.
PsfCurve sample_curve(std::function<double(double)> profile, double extent, double step = 1e-3);
PsfCurve classical_curve(double c, double step = 1e-3);
PsfCurve reconstruction_curve(const ProlateBasis& basis, std::size_t q, double step = 1e-3);

/// Smallest z > 0 where the curve reaches half its peak: bracketed on the
/// samples, refined by bisection on the profile to 1e-7 (linear interpolation
/// when no profile is attached). Throws NoCrossing.
double half_width(const PsfCurve& curve);

/// a_k = sqrt(S eps) phi_k(0): projection of a top-hat of width eps and total
/// photon number S centred on the origin.
std::vector<double> point_object_coeffs(const ProlateBasis& basis, double budget, double epsilon);

/// (sum_{k<Q} a_k^2)^2 / sum_{k<Q} a_k^2 / lambda_k. Throws AllZero.
double reconstruction_snr(const ProlateBasis& basis, const std::vector<double>& coeffs,
                          std::size_t q);

/// Largest Q <= K with reconstruction SNR >= 1. Throws TooDim if Q = 1 fails.
std::size_t choose_q(const ProlateBasis& basis, const std::vector<double>& coeffs);

struct ReconstructionReport {
  std::size_t q = 0;
  double w = 0.0;       ///< half-width of the classical PSF
  double w_q = 0.0;     ///< half-width of the reconstruction PSF
  double j = 0.0;       ///< w / w_q
  double snr_r = 0.0;   ///< reconstruction SNR at q (NaN when q was forced)
};

/// Report for a fixed mode count.
ReconstructionReport resolution_report(const ProlateBasis& basis, std::size_t q);

/// Chooses Q from the budget and reports the super-resolution factor.
ReconstructionReport superres_factor(const ProlateBasis& basis, double budget, double epsilon);

}  // namespace speckle
