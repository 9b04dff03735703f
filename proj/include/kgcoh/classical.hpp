#pragma once

#include <array>

namespace kgcoh {

// Dimensionless units throughout: momenta in mc, lengths in hbar/mc,
// times in hbar/mc^2, energies in mc^2.

struct FreeClassical {
  double velocity;
  double energy;
};

FreeClassical free_classical(double p);

struct ClassicalHelix {
  double Lambda = 1.0;
  double p_perp = 0.0;
  double p3 = 0.0;
};

struct HelixDerived {
  double energy;  // gamma
  double omega_B;
  double radius;
  double period;
  double pitch_angle;
};

HelixDerived helix_derived(const ClassicalHelix& h);

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// Gyration center of the orbit that starts at the origin with momentum along +x1.
Vec2 default_gyration_center(const ClassicalHelix& h);

// Position at time tau for a positive charge; at tau = 0 the particle sits at
// center + (0, R) moving along +x1, and x3 starts at 0.
Vec3 helix_position(const ClassicalHelix& h, double tau, const Vec2& gyration_center);

// Kinetic momentum (Pi1, Pi2, p3) along the same orbit.
Vec3 helix_kinetic_momentum(const ClassicalHelix& h, double tau);

// Canonical momenta p = Pi + (Lambda/2)(-x2, x1) in the symmetric gauge.
Vec2 canonical_momentum(double Lambda, const Vec2& x, const Vec2& Pi);

// x_gc = (x1/2 + p2/Lambda, x2/2 - p1/Lambda) from position and canonical momenta.
Vec2 gyration_center(double Lambda, const Vec2& x, const Vec2& p);

// L3 = x1 p2 - x2 p1.
double angular_momentum(const Vec2& x, const Vec2& p);

}  // namespace kgcoh
