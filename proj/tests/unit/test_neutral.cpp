#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "kgcoh/errors.hpp"
#include "kgcoh/neutral.hpp"

using namespace kgcoh;

TEST_CASE("partner state") {
  auto s = NeutralCoherentState::make(0.7, 1.2, 1.0);
  auto p = partner(s);
  CHECK(p.p_mean == -1.0);
  CHECK(p.epsilon == -1);
  CHECK(p.lambda == s.base.lambda);
  CHECK(p.alpha == s.base.alpha);

  auto z = partner(NeutralCoherentState::make(0.7, 1.2, 0.0));
  CHECK(z.p_mean == 0.0);
  CHECK(z.epsilon == -1);

  for (double x : {-3.0, 0.0, 1.2, 4.0}) {
    const auto a = wavefn_x(s.base, x), b = wavefn_x(p, x);
    CHECK(std::abs(b - std::conj(a)) < 1e-15);
  }
  NeutralCoherentState bad{FreeCoherentState::make(1, 0, 1, -1)};
  CHECK_THROWS_AS(partner(bad), InvalidArgument);
}

TEST_CASE("both components carry the same physical momentum") {
  auto s = NeutralCoherentState::make(0.7, 1.2, 0.8);
  CHECK(physical_momentum(s.base) == 0.8);
  CHECK(physical_momentum(partner(s)) == 0.8);
}

TEST_CASE("neutral field is real") {
  double worst = 0.0;
  for (auto [lambda, pm] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}, std::pair{0.3, 0.0}}) {
    auto s = NeutralCoherentState::make(lambda, 0.4, pm);
    for (double tau : {0.0, 2.0, 10.0, 30.0})
      for (double x = -15; x <= 15; x += 1.5) worst = std::max(worst, std::abs(neutral_field(s, tau, x).imag()));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("at rest and tau = 0 the field is sqrt(2) Re psi_+") {
  auto s = NeutralCoherentState::make(0.6, 0.0, 0.0);
  for (double x : {-2.0, 0.0, 1.5}) {
    const auto n = neutral_field(s, 0.0, x);
    CHECK(n.real() == doctest::Approx(std::sqrt(2.0) * kg_field(s.base, 0.0, x).real()).epsilon(1e-12));
  }
}

TEST_CASE("non-default normalization") {
  auto s = NeutralCoherentState::make(1.0, 0.0, 1.0);
  const auto a = neutral_field(s, 3.0, 1.0);
  const auto b = neutral_field(s, 3.0, 1.0, {}, {4.0});
  CHECK(std::abs(b - a / 2.0) < 1e-14);
}
