#include <doctest.h>

#include <cmath>
#include <numbers>

#include "speckle/errors.hpp"
#include "speckle/prolate.hpp"

using namespace speckle;

namespace {

const ProlateBasis& basis_c1() {
  static const ProlateBasis b = build_basis(1.0, 7, 256);
  return b;
}

double kernel(double c, double x) {
  return x == 0.0 ? c / std::numbers::pi : std::sin(c * x) / (std::numbers::pi * x);
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  std::vector<long double> x, w;
  gauss_legendre(16, x, w);
  long double total = 0.0L, x30 = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += w[i];
    x30 += w[i] * std::pow(x[i], 30);
  }
  CHECK(static_cast<double>(total) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(static_cast<double>(x30) == doctest::Approx(2.0 / 31.0).epsilon(1e-14));
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
}

TEST_CASE("spectral bounds at c = 1") {
  const auto& b = basis_c1();
  double total = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    CHECK(b.lambda(k) > 0.0);
    CHECK(b.lambda(k) < 1.0);
    if (k > 0) CHECK(b.lambda(k) < b.lambda(k - 1));
    total += b.lambda(k);
  }
  CHECK(total <= 2.0 / std::numbers::pi);
  CHECK(b.lambda(0) == doctest::Approx(0.5725817806).epsilon(1e-9));
  CHECK(b.lambda(1) == doctest::Approx(0.0627912741).epsilon(1e-9));
}

TEST_CASE("bad requests") {
  CHECK_THROWS_AS(build_basis(0.0, 3), InvalidArgument);
  CHECK_THROWS_AS(build_basis(1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(build_basis(1.0, 65, 256), InvalidArgument);
  CHECK_THROWS_AS(build_basis(1.0, 3, 255), InvalidArgument);
  // lambda_19 at c = 1 is far below long double resolution
  CHECK_THROWS_AS(build_basis(1.0, 20, 256), ConvergenceError);
}

TEST_CASE("c = 1, K = 8 stays inside the spectral bounds") {
  const auto b = build_basis(1.0, 8, 256);
  double total = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    CHECK(b.lambda(k) > 0.0);
    CHECK(b.lambda(k) < 1.0);
    if (k > 0) CHECK(b.lambda(k) < b.lambda(k - 1));
    total += b.lambda(k);
  }
  CHECK(total <= 2.0 / std::numbers::pi);
}

TEST_CASE("trace, orthonormality, parity and self-convergence") {
  for (double c : {0.5, 1.0, 2.0}) {
    CAPTURE(c);
    const std::size_t k_max = resolvable_modes(c, 256, 1e-12);
    const auto b = build_basis(c, k_max, 256);
    const auto fine = build_basis(c, k_max, 512);
    double total = 0.0;
    for (double l : b.lambda()) total += l;
    CHECK(std::abs(total - 2.0 * c / std::numbers::pi) < 1e-6);

    const auto& w = b.weights();
    double worst_gram = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * b.samples(j)[i] * b.samples(k)[i];
        worst_gram = std::max(worst_gram, std::abs(dot - (j == k ? 1.0 : 0.0)));
      }
    CHECK(worst_gram < 1e-8);

    const std::size_t n = b.nodes().size();
    double worst_parity = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i)
        worst_parity = std::max(worst_parity,
                                std::abs(b.samples(k)[n - 1 - i] - sign * b.samples(k)[i]));
    }
    CHECK(worst_parity < 1e-8);

    for (std::size_t k = 0; k < b.size(); ++k)
      CHECK(std::abs(b.lambda(k) - fine.lambda(k)) <= 1e-9);
  }
}

TEST_CASE("eigenfunctions converge under quadrature doubling") {
  const auto& b = basis_c1();
  const auto fine = build_basis(1.0, 7, 512);
  for (std::size_t k = 0; k < b.size(); ++k) {
    double worst = 0.0;
    for (double z = -1.0; z <= 1.0; z += 0.01) worst = std::max(worst, std::abs(b.eval(k, z) - fine.eval(k, z)));
    CAPTURE(k);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("sign conventions and zero crossings") {
  const auto& b = basis_c1();
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (k % 2 == 0) CHECK(b.at_origin(k) > 0.0);
    else {
      CHECK(b.at_origin(k) == 0.0);
      CHECK(b.eval(k, 1e-3) > 0.0);
    }
    int changes = 0;
    const auto& phi = b.samples(k);
    for (std::size_t i = 1; i < phi.size(); ++i)
      if ((phi[i] > 0.0) != (phi[i - 1] > 0.0)) ++changes;
    CHECK(changes == static_cast<int>(k));
  }
  CHECK(b.eval(0, 1.5) == 0.0);
  CHECK(b.eval(2, -1.01) == 0.0);
}

TEST_CASE("off-grid evaluation agrees with the samples") {
  const auto& b = basis_c1();
  for (std::size_t k = 0; k < b.size(); ++k)
    for (std::size_t i = 0; i < b.nodes().size(); i += 17)
      CHECK(std::abs(b.eval(k, b.nodes()[i]) - b.samples(k)[i]) < 1e-10);
}

TEST_CASE("kernel completeness on the grid") {
  const double c = 1.0;
  const auto b = build_basis(c, resolvable_modes(c, 256, 1e-12), 256);
  const auto& z = b.nodes();
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); i += 5)
    for (std::size_t j = 0; j < z.size(); j += 7) {
      double sum = 0.0;
      for (std::size_t k = 0; k < b.size(); ++k) sum += b.lambda(k) * b.samples(k)[i] * b.samples(k)[j];
      worst = std::max(worst, std::abs(sum - kernel(c, z[i] - z[j])));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("classical PSF") {
  CHECK(classical_psf(1.0, 0.0) == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(classical_psf(2.5, 0.0) == doctest::Approx(2.5 / std::numbers::pi));
  CHECK(std::abs(classical_psf(1.0, std::numbers::pi)) < 1e-16);
  CHECK(half_width(classical_curve(1.0)) == doctest::Approx(1.8955).epsilon(1e-3 / 1.8955));
  CHECK(half_width(classical_curve(2.0)) == doctest::Approx(1.8954942670 / 2.0).epsilon(1e-6));
}

TEST_CASE("half width of simple curves") {
  auto rect = sample_curve([](double z) { return std::abs(z) <= 0.5 ? 1.0 : 0.0; }, 2.0);
  CHECK(half_width(rect) == doctest::Approx(0.5).epsilon(1e-6));
  auto tri = sample_curve([](double z) { return 1.0 - z; }, 1.0);
  tri.profile = nullptr;
  CHECK(half_width(tri) == doctest::Approx(0.5).epsilon(1e-9));
  auto flat = sample_curve([](double) { return 1.0; }, 1.0);
  CHECK_THROWS_AS(half_width(flat), NoCrossing);
}

TEST_CASE("reconstruction PSF") {
  const auto& b = basis_c1();
  const double w_q = half_width(reconstruction_curve(b, 7));
  CHECK(w_q == doctest::Approx(0.25).epsilon(0.01 / 0.25));
  double prev = 0.0;
  for (std::size_t q = 1; q <= b.size(); q += 2) {
    const double peak = reconstruction_psf(b, q, 0.0);
    CHECK(peak > prev);
    prev = peak;
  }
  // odd modes vanish at the source
  CHECK(reconstruction_psf(b, 2, 0.3) == reconstruction_psf(b, 1, 0.3));
  CHECK(reconstruction_psf(b, 1, 0.4) == doctest::Approx(b.at_origin(0) * b.eval(0, 0.4)));
  CHECK_THROWS_AS(reconstruction_psf(b, 8, 0.0), InvalidArgument);
}

TEST_CASE("Q = 7 reproduces W, W_Q and J") {
  const auto rep = resolution_report(basis_c1(), 7);
  CHECK(rep.w == doctest::Approx(1.90).epsilon(0.01 / 1.90));
  CHECK(rep.w_q == doctest::Approx(0.25).epsilon(0.01 / 0.25));
  CHECK(rep.j == doctest::Approx(7.6).epsilon(0.3 / 7.6));
  CHECK(std::isnan(rep.snr_r));
  const auto one = resolution_report(basis_c1(), 1);
  CHECK(one.j >= 1.0);
  CHECK(one.j < 2.5);
}

TEST_CASE("point object coefficients") {
  const auto& b = basis_c1();
  const auto a = point_object_coeffs(b, 1e6, 0.01);
  for (std::size_t k = 1; k < a.size(); k += 2) CHECK(a[k] == 0.0);
  for (double x : point_object_coeffs(b, 0.0, 0.01)) CHECK(x == 0.0);
  CHECK_THROWS_AS(point_object_coeffs(b, -1.0, 0.01), InvalidArgument);
  CHECK_THROWS_AS(point_object_coeffs(b, 1.0, 0.0), InvalidArgument);

  // projection of the top hat sqrt(S/eps) on [-eps/2, eps/2] by direct quadrature
  const double S = 1e6, eps = 0.01;
  double direct = 0.0, model = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const int n = 2000;
    double proj = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = -eps / 2 + eps * (i + 0.5) / n;
      proj += std::sqrt(S / eps) * b.eval(k, z) * eps / n;
    }
    direct += proj * proj;
    model += a[k] * a[k];
  }
  CHECK(std::abs(direct - model) / model < 0.01);
  double phi0 = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) phi0 += b.at_origin(k) * b.at_origin(k);
  CHECK(model == doctest::Approx(S * eps * phi0).epsilon(1e-12));
}

TEST_CASE("reconstruction SNR and mode count") {
  const auto& b = basis_c1();
  std::vector<double> only0(b.size(), 0.0);
  only0[0] = 3.0;
  CHECK(reconstruction_snr(b, only0, 1) == doctest::Approx(9.0 * b.lambda(0)));
  CHECK(reconstruction_snr(b, only0, 4) == reconstruction_snr(b, only0, 1));
  CHECK_THROWS_AS(reconstruction_snr(b, std::vector<double>(b.size(), 0.0), 3), AllZero);

  std::vector<double> two = only0;
  two[2] = 1.0;
  CHECK(reconstruction_snr(b, two, 3) < reconstruction_snr(b, two, 1));

  CHECK(choose_q(b, point_object_coeffs(b, 1e30, 0.01)) == b.size());
  CHECK_THROWS_AS(choose_q(b, point_object_coeffs(b, 1.0, 0.01)), TooDim);
  CHECK_THROWS_AS(superres_factor(b, 1e-3, 0.01), TooDim);

  std::size_t prev_q = 0;
  double prev_j = 0.0;
  for (double s = 1e3; s < 1e20; s *= 3.0) {
    const auto rep = superres_factor(b, s, 0.01);
    CHECK(rep.q >= prev_q);
    CHECK(rep.j >= prev_j);
    CHECK(rep.snr_r >= 1.0);
    prev_q = rep.q;
    prev_j = rep.j;
  }
}
