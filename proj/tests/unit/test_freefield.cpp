#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "kgcoh/classical.hpp"
#include "kgcoh/errors.hpp"
#include "kgcoh/freefield.hpp"

using namespace kgcoh;
using cplx = std::complex<double>;

namespace {

const double kPi = std::numbers::pi;

template <class F>
double trapezoid(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

// x at which the density peaks, by golden-section refinement of a coarse scan.
double peak(const FreeCoherentState& s, double tau, double lo, double hi) {
  double best = lo, best_v = -1;
  for (double x = lo; x <= hi; x += 0.25) {
    const double v = probability_density(s, tau, x);
    if (v > best_v) best_v = v, best = x;
  }
  double a = best - 0.25, b = best + 0.25;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 60; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (probability_density(s, tau, c) > probability_density(s, tau, d))
      b = d;
    else
      a = c;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("state construction") {
  CHECK_THROWS_AS(FreeCoherentState::make(0.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(FreeCoherentState::make(-1.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(FreeCoherentState::make(1.0, 0.0, 1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(FreeCoherentState::make(1.0, NAN, 1.0), InvalidArgument);
  CHECK_FALSE(FreeCoherentState::make(1.0, 0.0, 1.0).wide_momentum_warning());
  CHECK(FreeCoherentState::make(2.0, 0.0, 1.0).wide_momentum_warning());
}

TEST_CASE("position wave function") {
  auto s = FreeCoherentState::make(0.8, 1.5, 0.6);
  const cplx at = wavefn_x(s, s.alpha);
  CHECK(std::abs(at) == doctest::Approx(std::pow(0.64 / (2 * kPi), 0.25)).epsilon(1e-15));
  CHECK(std::arg(at) == doctest::Approx(0.6 * 1.5 / 2).epsilon(1e-14));
  const double norm = trapezoid([&](double x) { return std::norm(wavefn_x(s, x)); }, -40, 40, 20000);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("momentum wave function is the Fourier transform") {
  auto s = FreeCoherentState::make(0.8, 1.5, 0.6);
  const double norm = trapezoid([&](double p) { return std::norm(wavefn_p(s, p)); }, -10, 10, 20000);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(wavefn_p(s, 0.6)) > std::abs(wavefn_p(s, 0.6 + 1e-3)));
  CHECK(std::abs(wavefn_p(s, 0.6)) > std::abs(wavefn_p(s, 0.6 - 1e-3)));
  for (double p : {-0.5, 0.0, 0.4, 0.6, 1.1, 2.0}) {
    const double re = trapezoid([&](double x) { return (wavefn_x(s, x) * std::polar(1.0, -p * x)).real(); }, -50, 50, 40000);
    const double im = trapezoid([&](double x) { return (wavefn_x(s, x) * std::polar(1.0, -p * x)).imag(); }, -50, 50, 40000);
    const cplx ft = cplx(re, im) / std::sqrt(2 * kPi);
    CAPTURE(p);
    CHECK(std::abs(ft - wavefn_p(s, p)) < 1e-8);
  }
}

TEST_CASE("static moments") {
  CHECK(*static_moments(FreeCoherentState::make(0.3, 0, 2)).uncertainty_product == 0.5);
  CHECK(std::sqrt(*static_moments(FreeCoherentState::make(2.0, 0, 0)).x_var) == doctest::Approx(0.5));
  CHECK(*static_moments(FreeCoherentState::make(0.25, 0, 0)).p_var == doctest::Approx(0.015625));
}

TEST_CASE("velocity expectation values") {
  CHECK(std::abs(velocity_moments(FreeCoherentState::make(1, 0, 0)).v_mean) < 1e-15);
  CHECK(std::abs(velocity_moments(FreeCoherentState::make(1, 0, 1)).v_mean - 0.6421) < 5e-4);
  CHECK(std::abs(velocity_moments(FreeCoherentState::make(0.5, 0, 1)).v_mean - 0.6903) < 5e-4);
  CHECK(std::abs(velocity_moments(FreeCoherentState::make(1, 0, 2)).v_mean - 0.8786) < 5e-4);
  // charge conjugate sector moves the other way
  CHECK(velocity_moments(FreeCoherentState::make(1, 0, 1, -1)).v_mean ==
        doctest::Approx(-velocity_moments(FreeCoherentState::make(1, 0, 1)).v_mean));
}

TEST_CASE("evolved moments") {
  auto s = FreeCoherentState::make(0.7, 0.3, 1.4);
  auto m0 = evolved_moments(s, 0.0);
  auto st = static_moments(s);
  CHECK(*m0.x_mean == doctest::Approx(*st.x_mean));
  CHECK(*m0.x_var == doctest::Approx(*st.x_var));
  CHECK(*m0.uncertainty_product == doctest::Approx(0.5));
  for (double tau : {0.5, 3.0, 40.0}) CHECK(*evolved_moments(s, tau).uncertainty_product > 0.5);

  // narrow momentum distribution: the classical trajectory
  auto c = FreeCoherentState::make(1e-3, 0.3, 1.4);
  const double tau = 25.0;
  CHECK(*evolved_moments(c, tau).x_mean == doctest::Approx(0.3 + tau * 1.4 / std::sqrt(1 + 1.96)).epsilon(1e-6));
}

TEST_CASE("energy expectation values") {
  auto ratio = [](double lambda, double p) {
    return energy_moments(FreeCoherentState::make(lambda, 0, p)).E_mean / std::sqrt(1 + p * p);
  };
  CHECK(std::abs(ratio(0.25, 0.1) - 1.00758) < 1e-4);
  CHECK(std::abs(ratio(2.0, 0.001) - 1.35453) < 1e-4);
  for (double lambda : {0.1, 1.0, 3.0})
    for (double p : {0.0, 0.5, 4.0}) CHECK(ratio(lambda, p) >= 1.0);
  auto e = energy_moments(FreeCoherentState::make(0.5, 0, 1));
  CHECK(e.E_sq_mean == doctest::Approx(1 + 1 + 0.0625));
  CHECK(e.E_var == doctest::Approx(e.E_sq_mean - e.E_mean * e.E_mean));
}

TEST_CASE("nonrelativistic moments") {
  auto ratio = [](double lambda, double p) {
    return *nonrel_moments(FreeCoherentState::make(lambda, 0, p), 0).E_mean / std::sqrt(1 + p * p);
  };
  CHECK(std::abs(ratio(2.0, 0.001) - 1.50000) < 1e-5);
  CHECK(std::abs(ratio(0.5, 0.1) - 1.03109) < 1e-4);
  for (double lambda : {0.25, 0.5, 2.0})
    for (double p : {0.1, 0.001})
      CHECK(ratio(lambda, p) == doctest::Approx((1 + (p * p + lambda * lambda / 4) / 2) / std::sqrt(1 + p * p)).epsilon(1e-13));
  CHECK(*nonrel_moments(FreeCoherentState::make(0.9, 0, 1), 0).uncertainty_product == 0.5);
  auto s = FreeCoherentState::make(0.9, 2.0, 0.4);
  CHECK(*nonrel_moments(s, 10).x_mean == doctest::Approx(2.0 + 4.0));
}

TEST_CASE("probability density") {
  auto s = FreeCoherentState::make(0.9, 1.0, 1.3);
  for (double x : {-2.0, 0.0, 1.0, 3.5}) {
    const double expect = 0.9 / std::sqrt(2 * kPi) * std::exp(-0.81 * (x - 1.0) * (x - 1.0) / 2);
    CHECK(probability_density(s, 0.0, x) == doctest::Approx(expect).epsilon(1e-10));
  }
  for (double tau : {0.0, 5.0, 20.0}) {
    const double sd = std::sqrt(*evolved_moments(s, tau).x_var);
    const double xm = *evolved_moments(s, tau).x_mean;
    const double mass = trapezoid([&](double x) { return probability_density(s, tau, x); }, xm - 14 * sd, xm + 14 * sd, 224);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
  auto minus = FreeCoherentState::make(0.9, 1.0, 1.3, -1);
  for (double tau : {3.0, 12.0})
    for (double x = -20; x <= 20; x += 4)
      CHECK(std::abs(probability_density(minus, tau, x) - probability_density(s, -tau, x)) < 1e-10);
}

TEST_CASE("density maximum outruns the packet") {
  // the peak moves faster than both <xdot> and the classical velocity, but
  // slower than light
  auto s = FreeCoherentState::make(1.0, 0.0, 1.0);
  const double x20 = peak(s, 20.0, 5, 25), x40 = peak(s, 40.0, 15, 45);
  const double v_peak = (x40 - x20) / 20.0;
  CHECK(v_peak > free_classical(1.0).velocity);
  CHECK(v_peak > velocity_moments(s).v_mean);
  CHECK(v_peak < 1.0);
}

TEST_CASE("KG field") {
  // slow packet: |psi|^2 -> rho, relative gap of order lambda^2/4
  for (double lambda : {0.05, 0.1, 0.25, 0.5}) {
    auto s = FreeCoherentState::make(lambda, 0.0, 0.001);
    const double top = probability_density(s, 0.0, 0.0);
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
      CAPTURE(lambda);
      CHECK(std::abs(kg_density(s, 0.0, x / lambda) - probability_density(s, 0.0, x / lambda)) < 0.3 * lambda * lambda * top);
    }
  }
  auto f = FreeCoherentState::make(1.0, 0.5, 1.0);
  CHECK(kg_density(f, 2.0, 1.0, {2.0}) == doctest::Approx(kg_density(f, 2.0, 1.0) / 2).epsilon(1e-14));
  CHECK_THROWS_AS(kg_field(f, 0, 0, {0.0}), InvalidArgument);
}
