#include <doctest.h>

#include <cmath>

#include "speckle/errors.hpp"
#include "speckle/fock_oracle.hpp"

using namespace speckle;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("single-mode amplitudes are normalized and match the Gaussian moments") {
  SqueezedInput in = SqueezedInput::aligned(2.0, 0.4, 1);
  in.alpha_phase = 0.7;
  in.squeeze_phase = -0.3;
  const auto c = squeezed_coherent_amplitudes(in, 80);
  double norm = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double p = std::norm(c[n]);
    norm += p;
    mean += p * static_cast<double>(n);
    second += p * static_cast<double>(n * n);
  }
  const auto g = gaussian_photon_moments(GaussianModeState::squeezed_coherent(in));
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mean == doctest::Approx(g.mean).epsilon(1e-12));
  CHECK(second - mean * mean == doctest::Approx(g.variance).epsilon(1e-11));
}

TEST_CASE("single-mode examples") {
  ModeCoefficients one{{{1.0, 0.0}}};
  const auto coh = fock_photon_moments(one, SqueezedInput::aligned(1.0, 0.0, 1), 30);
  CHECK(std::abs(coh.mean - 1.0) < 1e-8);
  CHECK(std::abs(coh.variance - 1.0) < 1e-8);

  const auto sv = fock_photon_moments(one, SqueezedInput::aligned(0.0, 0.5, 1), 40);
  const double sh2 = std::sinh(0.5) * std::sinh(0.5);
  const double ch2 = std::cosh(0.5) * std::cosh(0.5);
  CHECK(std::abs(sv.mean - sh2) < 1e-8);
  CHECK(std::abs(sv.variance - 2.0 * sh2 * ch2) < 1e-8);
}

TEST_CASE("two shaped modes agree with the closed form") {
  const auto real = ScatteringRealization::from_amplitudes({std::sqrt(0.6), std::sqrt(0.4)},
                                                           {0.0, 0.0});
  const auto in = SqueezedInput::aligned(2.0, 0.3, 2);
  const auto coeffs = fed_port_coefficients(real, 2);
  CHECK(coeffs.c.size() == 2);  // no vacuum weight left
  const auto fock = fock_photon_moments(coeffs, in, 40);
  const auto sums = coupling_sums(real);
  CHECK(rel(fock.variance, variance_photon(sums, in)) < 1e-6);
  CHECK(rel(fock.mean, mean_photon(sums, in)) < 1e-6);
}

TEST_CASE("three-mode cases agree with both engines") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto real = sample_realization({2, 1.5 + static_cast<double>(seed)}, seed);
    SqueezedInput in = SqueezedInput::aligned(0.5 + 0.5 * static_cast<double>(seed), 0.1 * static_cast<double>(seed), 2);
    const auto coeffs = fed_port_coefficients(real, 2);
    CHECK(coeffs.c.size() == 3);
    const auto fock = fock_photon_moments(coeffs, in, 40);
    const auto gauss = gaussian_photon_moments(output_gaussian_state(real, in));
    const auto closed = photon_moments(real, in);
    CHECK(rel(fock.mean, gauss.mean) < 1e-6);
    CHECK(rel(fock.variance, gauss.variance) < 1e-6);
    CHECK(rel(fock.mean, closed.mean) < 1e-6);
    CHECK(rel(fock.variance, closed.variance) < 1e-6);
  }
}

TEST_CASE("phases are handled by the Fock engine too") {
  const auto real = sample_realization({1, 2.0}, 4);
  SqueezedInput in = SqueezedInput::aligned(1.5, 0.35, 1);
  in.alpha_phase = 0.9;
  in.squeeze_phase = 2.1;
  ModeCoefficients coeffs{{std::polar(real.t_amp[0], 0.4), std::polar(real.r_amp[0], 1.3)}};
  const auto fock = fock_photon_moments(coeffs, in, 40);
  const auto gauss = gaussian_photon_moments(
      combine_modes(coeffs, {GaussianModeState::squeezed_coherent(in), GaussianModeState::vacuum()}));
  CHECK(rel(fock.mean, gauss.mean) < 1e-8);
  CHECK(rel(fock.variance, gauss.variance) < 1e-8);
}

TEST_CASE("preconditions") {
  ModeCoefficients one{{{1.0, 0.0}}};
  CHECK_THROWS_AS(fock_photon_moments(one, SqueezedInput::aligned(50.0, 0.0, 1), 20), TruncationError);
  CHECK_THROWS_AS(fock_photon_moments(one, SqueezedInput::aligned(1.0, 0.0, 1), 1), InvalidArgument);
  CHECK_THROWS_AS(fock_photon_moments(one, SqueezedInput::aligned(1.0, 0.0, 1), 300), InvalidArgument);
  ModeCoefficients four{{{0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}}};
  CHECK_THROWS_AS(fock_photon_moments(four, SqueezedInput::aligned(1.0, 0.0, 4), 10), InvalidArgument);
  ModeCoefficients unnorm{{{0.5, 0.0}}};
  CHECK_THROWS_AS(fock_photon_moments(unnorm, SqueezedInput::aligned(1.0, 0.0, 1), 10), InvalidArgument);
}
