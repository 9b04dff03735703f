#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "kgcoh/errors.hpp"
#include "kgcoh/freefield.hpp"
#include "kgcoh/magnetic.hpp"

using namespace kgcoh;

namespace {

const double kPi = std::numbers::pi;

MagneticCoherentState row1() { return MagneticCoherentState::make(0.01, 0.1, 1e-3, 1.2, 1.6); }

}  // namespace

TEST_CASE("state and spec validation") {
  CHECK_THROWS_AS(MagneticCoherentState::make(0.0, 0.1, 0.1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(MagneticCoherentState::make(0.01, -0.1, 0.1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(MagneticCoherentState::make(0.01, 0.1, 0.0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(MagneticCoherentState::make(0.01, 0.1, 0.1, -1, 1), InvalidArgument);
  SeriesSpec bad;
  bad.tail_tol = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK(row1().Pi() == doctest::Approx(2.0));
}

TEST_CASE("series constants") {
  auto matched = series_constants(MagneticCoherentState::make(0.01, 0.1, 1e-3, 1.2, 1.6));
  CHECK(std::abs(matched.s) < 1e-15);
  CHECK(matched.su == doctest::Approx(1.44 / 0.02).epsilon(1e-12));
  CHECK(matched.matched_width);

  auto wide = series_constants(MagneticCoherentState::make(0.01, 0.5, 1e-3, 1.2, 1.6));
  CHECK(wide.s == doctest::Approx((0.01 - 0.25) / 0.26).epsilon(1e-12));
  CHECK(wide.s == doctest::Approx(-0.923077).epsilon(1e-6));

  auto rest = series_constants(MagneticCoherentState::make(0.01, 0.5, 1e-3, 0.0, 1.6));
  CHECK(rest.u == 0.0);
  CHECK(rest.F_amp == 0.0);
}

TEST_CASE("Landau levels") {
  CHECK(landau_energy({0, 0, 0.0}, 0.01) == doctest::Approx(1.01));
  CHECK(landau_energy({0, 3, 0.0}, 0.01) == doctest::Approx(1.01));
  CHECK(landau_energy({0, -1, 0.0}, 0.01) == doctest::Approx(1.03));
  CHECK(landau_energy({2, 1, 0.5}, 1e-12) == doctest::Approx(1.25));
  CHECK(landau_level(2, 3) == 2);
  CHECK(landau_level(2, -3) == 5);
}

TEST_CASE("initial conditions") {
  MagneticPacket m(row1());
  auto x = m.transverse_position(0.0);
  const double R = 120.0;
  CHECK(std::abs(x.x1_mean) < 1e-9 * R);
  CHECK(std::abs(x.x2_mean) < 1e-9 * R);
  auto p = m.momentum_expectations(0.0);
  CHECK(p.p1 == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(std::abs(p.p2) < 1e-9);
  CHECK(p.p3 == doctest::Approx(1.6));
  CHECK(p.Pi1 == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(std::abs(p.Pi2) < 1e-9);
  CHECK(m.x3_uncertainty(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.parallel_motion(0.0).x3_mean == 0.0);
}

TEST_CASE("gyration center is constant") {
  MagneticPacket m(MagneticCoherentState::make(0.01, 0.25, 0.25, 1.2, 1.6));
  const auto h = helix_derived(m.state().classical());
  for (double f : {0.0, 0.3, 1.7, 4.9}) {
    auto g = m.momentum_expectations(f * h.period);
    CAPTURE(f);
    CHECK(std::abs(g.x1_gc) < 1e-10 * h.radius);
    CHECK(std::abs(g.x2_gc + 1.2 / 0.01) < 1e-10 * h.radius);
  }
}

TEST_CASE("Table 2 first row") {
  MagneticPacket m(row1());
  const auto h = helix_derived(m.state().classical());
  const auto c = m.conserved_expectations();
  const double R = h.radius;
  CHECK(std::abs(c.E_mean / h.energy - 1.00086) < 2e-3);
  CHECK(std::abs(m.parallel_motion(0).x3dot_mean / (1.6 / h.energy) - 0.99943) < 5e-4);
  CHECK(std::abs(c.R_mean / R - 1.00174) < 2e-3);
  CHECK(std::abs(c.R_sq_mean / (R * R) - 1.00694) < 2e-3);
  CHECK(std::abs(std::sqrt(c.R_var) / R - 0.05887) < 2e-3);
  CHECK(std::abs(c.L3_mean) < 1e-12);
  CHECK(std::abs(c.total_probability - 1.0) < 1e-8);
  CHECK(c.R_sq_mean == doctest::Approx(c.R_gc_sq_mean).epsilon(1e-10));
  auto rep = m.report();
  CHECK(rep.terms > 0);
  CHECK(rep.total_probability == doctest::Approx(c.total_probability));
}

TEST_CASE("Table 3 radius at two field strengths") {
  for (auto [L, ref] : {std::pair{0.1, 1.10069}, std::pair{1e-4, 1.08681}}) {
    MagneticPacket m(MagneticCoherentState::make(L, 0.5, 0.5, 1.2, 1.6));
    const double R = 1.2 / L;
    CAPTURE(L);
    CHECK(std::abs(m.conserved_expectations().R_sq_mean / (R * R) - ref) < 2e-3);
  }
}

TEST_CASE("slow packet") {
  auto s = MagneticCoherentState::make(0.1, 0.25, 0.25, 0.0006, 0.0008);
  MagneticPacket m(s);
  const double E_cl = std::sqrt(1 + 1e-6);
  CHECK(std::abs(m.parallel_motion(0).x3dot_mean / (0.0008 / E_cl) - 0.93013) < 1e-3);
  CHECK(std::abs(nonrel_expectations(s, 0).E_mean / E_cl - 1.06344) < 1e-5);
  auto back = nonrel_expectations(s, 2 * kPi / s.Lambda);
  CHECK(std::abs(back.x1) < 1e-12);
  CHECK(std::abs(back.x2) < 1e-12);
}

TEST_CASE("zero parallel momentum") {
  MagneticPacket m(MagneticCoherentState::make(0.01, 0.3, 0.4, 1.0, 0.0));
  CHECK(std::abs(m.parallel_motion(50.0).x3dot_mean) < 1e-14);
}

TEST_CASE("lambda3 does not change the transverse invariants") {
  MagneticPacket a(MagneticCoherentState::make(0.01, 0.5, 1e-3, 1.2, 1.6));
  MagneticPacket b(MagneticCoherentState::make(0.01, 0.5, 0.5, 1.2, 1.6));
  const auto ca = a.conserved_expectations(), cb = b.conserved_expectations();
  CHECK(ca.R_mean == doctest::Approx(cb.R_mean).epsilon(1e-12));
  CHECK(ca.R_sq_mean == doctest::Approx(cb.R_sq_mean).epsilon(1e-12));
  CHECK(std::abs(ca.L3_mean - cb.L3_mean) < 1e-12);
}

TEST_CASE("spreading grows with the field") {
  const double tau = 200.0;
  MagneticPacket weak(MagneticCoherentState::make(0.01, 0.25, 0.25, 1.2, 1.6));
  MagneticPacket strong(MagneticCoherentState::make(0.1, 0.25, 0.25, 1.2, 1.6));
  CHECK(strong.x3_uncertainty(tau) > weak.x3_uncertainty(tau));
}

TEST_CASE("zero-field limit") {
  const double L = 1e-8;
  auto s = MagneticCoherentState::make(L, std::sqrt(L), 0.5, 0.0, 1.0);
  auto free = FreeCoherentState::make(0.5, 0.0, 1.0);
  const auto v = velocity_moments(free);
  const auto e = energy_moments(free);
  const auto fl = free_limit_check(s, 7.0);
  CHECK(std::abs(*fl.series.v_mean - v.v_mean) < 1e-6);
  CHECK(std::abs(*fl.quoted.v_mean - v.v_mean) < 1e-6);
  CHECK(std::abs(*fl.series.E_mean - e.E_mean) < 1e-6);
  CHECK(std::abs(*fl.quoted.E_mean - e.E_mean) < 1e-6);
  CHECK(fl.x1_mean == doctest::Approx(0.0));
  CHECK(fl.x2_mean == doctest::Approx(0.0));
  CHECK(nonrel_expectations(s, 0).E_mean == doctest::Approx(1 + 0.25 / 8 + 0.5).epsilon(1e-7));

  MagneticPacket m(s);
  CHECK(m.x3_uncertainty(7.0) == doctest::Approx(*evolved_moments(free, 7.0).uncertainty_product).epsilon(1e-6));
  CHECK_THROWS_AS(free_limit_check(MagneticCoherentState::make(L, 0.1, 0.5, 0.3, 1.0), 1.0), InvalidArgument);
}

TEST_CASE("nonrelativistic trajectory") {
  const double L = 1e-4;
  auto s = MagneticCoherentState::make(L, std::sqrt(L), 1e-3, 0.0006, 0.0008);
  MagneticPacket m(s);
  const auto h = helix_derived(s.classical());
  for (int i = 1; i <= 8; ++i) {
    const double tau = h.period * i / 8;
    const auto x = m.transverse_position(tau);
    CAPTURE(i);
    CHECK(std::abs(x.x1_mean - 6.0 * std::sin(L * tau)) < 1e-3 * h.radius);
    CHECK(std::abs(x.x2_mean - 6.0 * (std::cos(L * tau) - 1)) < 1e-3 * h.radius);
  }
}

TEST_CASE("helix in a weak field") {
  auto s = MagneticCoherentState::make(0.001, std::sqrt(0.001), 1e-3, 1.2, 1.6);
  MagneticPacket m(s);
  const auto h = helix_derived(s.classical());
  const auto c = default_gyration_center(s.classical());
  for (double f : {0.25, 0.5, 1.0, 1.75}) {
    const auto x = m.transverse_position(f * h.period);
    const auto cl = helix_position(s.classical(), f * h.period, c);
    CAPTURE(f);
    CHECK(std::abs(x.x1_mean - cl[0]) < 5e-3 * h.radius);
    CHECK(std::abs(x.x2_mean - cl[1]) < 5e-3 * h.radius);
  }
}

TEST_CASE("pairing choices agree on the conserved quantities") {
  MagneticPacket a(row1(), {}, {}, ThetaPairing::printed);
  MagneticPacket b(row1(), {}, {}, ThetaPairing::symmetric);
  CHECK(a.conserved_expectations().E_mean == b.conserved_expectations().E_mean);
  CHECK(std::abs(b.transverse_position(0).x1_mean) < 1e-9 * 120);
}

TEST_CASE("concurrent evaluation matches serial") {
  MagneticPacket m(MagneticCoherentState::make(0.01, 0.25, 0.25, 1.2, 1.6));
  std::vector<double> taus = {10, 200, 700, 1500};
  std::vector<double> par(taus.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < taus.size(); ++i) pool.emplace_back([&, i] { par[i] = m.transverse_position(taus[i]).x1_mean; });
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < taus.size(); ++i) CHECK(par[i] == m.transverse_position(taus[i]).x1_mean);
}

TEST_CASE("KG field") {
  MagneticPacket m(MagneticCoherentState::make(0.01, 0.25, 0.25, 0.6, 0.8));
  FieldSlice slice(m, 0.0, 0.0);
  CHECK(slice.density(0.0, 0.0) == doctest::Approx(std::norm(m.kg_field(0.0, 0.0, 1.3, 0.0))).epsilon(1e-12));
  // on the axis the azimuth is irrelevant
  CHECK(slice.density(0.0, 0.0) == doctest::Approx(slice.density(0.0, 2.0)).epsilon(1e-12));

  MagneticPacket other(MagneticCoherentState::make(0.001, 0.25, 0.25, 0.6, 0.8));
  FieldSlice s2(other, 0.0, 0.0);
  for (double r : {0.0, 2.0, 5.0})
    for (double phi : {0.0, kPi / 2}) CHECK(std::abs(slice.density(r, phi) - s2.density(r, phi)) < 1e-3);

  // slow packet: the Schroedinger density, up to a relative 3 lambda^2/4
  for (double l : {0.25, 0.1}) {
    MagneticPacket slow(MagneticCoherentState::make(l * l / 4, l, l, 1e-3, 1e-3));
    FieldSlice ss(slow, 0.0, 0.0);
    const double g3 = std::pow(l / std::sqrt(2 * kPi), 3);
    for (double r : {0.0, 0.5 / l, 1.5 / l}) {
      const double f = g3 * std::exp(-l * l * r * r / 2);
      CAPTURE(l);
      CHECK(std::abs(ss.density(r, 0.7) - f) < l * l * g3);
    }
  }
  CHECK_THROWS_AS(FieldSlice(m, 0, 0, {0.0}), InvalidArgument);
}
