#include "kgcoh/classical.hpp"

#include <cmath>
#include <numbers>

#include "kgcoh/errors.hpp"

namespace kgcoh {

FreeClassical free_classical(double p) {
  double e = std::sqrt(1.0 + p * p);
  return {p / e, e};
}

HelixDerived helix_derived(const ClassicalHelix& h) {
  if (!(h.Lambda > 0.0)) throw InvalidArgument("helix_derived: Lambda must be > 0");
  if (h.p_perp < 0.0) throw InvalidArgument("helix_derived: p_perp must be >= 0");
  HelixDerived d{};
  d.energy = std::sqrt(1.0 + h.p_perp * h.p_perp + h.p3 * h.p3);
  d.omega_B = h.Lambda / d.energy;
  d.radius = h.p_perp / h.Lambda;
  d.period = 2.0 * std::numbers::pi / d.omega_B;
  d.pitch_angle = std::atan2(h.p3, h.p_perp);
  return d;
}

Vec2 default_gyration_center(const ClassicalHelix& h) {
  return {0.0, -helix_derived(h).radius};
}

Vec3 helix_position(const ClassicalHelix& h, double tau, const Vec2& gyration_center) {
  const HelixDerived d = helix_derived(h);
  const double phase = d.omega_B * tau;
  return {gyration_center[0] + d.radius * std::sin(phase),
          gyration_center[1] + d.radius * std::cos(phase), h.p3 / d.energy * tau};
}

Vec3 helix_kinetic_momentum(const ClassicalHelix& h, double tau) {
  const HelixDerived d = helix_derived(h);
  const double phase = d.omega_B * tau;
  return {h.p_perp * std::cos(phase), -h.p_perp * std::sin(phase), h.p3};
}

Vec2 canonical_momentum(double Lambda, const Vec2& x, const Vec2& Pi) {
  return {Pi[0] - 0.5 * Lambda * x[1], Pi[1] + 0.5 * Lambda * x[0]};
}

Vec2 gyration_center(double Lambda, const Vec2& x, const Vec2& p) {
  return {0.5 * x[0] + p[1] / Lambda, 0.5 * x[1] - p[0] / Lambda};
}

double angular_momentum(const Vec2& x, const Vec2& p) { return x[0] * p[1] - x[1] * p[0]; }

}  // namespace kgcoh
