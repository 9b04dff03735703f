#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "kgcoh/classical.hpp"
#include "kgcoh/freefield.hpp"
#include "kgcoh/quadrature.hpp"

namespace kgcoh {

// Packet in a uniform field along x3, centered at the origin with mean
// transverse momentum along x1.
struct MagneticCoherentState {
  double Lambda = 0.01;
  double lambda_perp = 0.1;
  double lambda3 = 1e-3;
  double p1_mean = 1.2;
  double p3_mean = 1.6;

  static MagneticCoherentState make(double Lambda, double lambda_perp, double lambda3, double p1_mean,
                                    double p3_mean);

  double Pi() const;
  ClassicalHelix classical() const { return {Lambda, p1_mean, p3_mean}; }
};

struct SeriesConstants {
  double s = 0.0;
  double u = 0.0;   // 0 when the widths are matched
  double su = 0.0;  // s*u, finite for all widths
  double F_amp = 0.0;
  double E_amp = 0.0;
  double log_C = 0.0;  // log of the lowest-term normalization
  bool matched_width = false;
};

SeriesConstants series_constants(const MagneticCoherentState& s);

struct SeriesSpec {
  int n_max = 4000000;
  int ell_max = 4000000;
  double tail_tol = 1e-12;
  int consecutive_below = 3;
  double mass_tol = 1e-8;  // allowed |1 - total probability|

  void validate() const;
};

struct LandauMode {
  int n = 0;
  int ell = 0;
  double k3 = 0.0;
};

// Cyclotron level N = n + (|ell| - ell)/2.
int landau_level(int n, int ell);
// Squared energy eigenvalue 1 + k3^2 + Lambda (2n + 1 - ell + |ell|).
double landau_energy(const LandauMode& m, double Lambda);

// Which level the (n+1, ell)-(n, ell+1) pairs of the transverse series use.
enum class ThetaPairing { printed, symmetric };

struct TransversePosition {
  double x1_mean;
  double x2_mean;
};

struct ParallelMotion {
  double x3_mean;
  double x3dot_mean;
  double x3dot_sq_mean;
};

struct MomentumExpectations {
  double p1, p2, p3;
  double Pi1, Pi2;
  double x1_gc, x2_gc;
};

struct ConservedExpectations {
  double E_mean;
  double L3_mean;
  double R_mean;
  double R_sq_mean;
  double R_var;
  double R_gc_sq_mean;              // series over the guiding-center quantum number
  double R_sq_closed;               // closed form with the squared mean transverse momentum
  double R_sq_closed_second_moment; // closed form with the full second moment
  double total_probability;
};

struct SeriesReport {
  long long terms = 0;
  int columns = 0;
  int max_n = 0;
  int max_level = 0;
  double total_probability = 0.0;
};

class MagneticPacket;

// Field values at fixed (tau, x3) as a function of the transverse polar
// coordinates. The k3 kernels are cached per level and shared between calls.
class FieldSlice {
 public:
  FieldSlice(const MagneticPacket& packet, double tau, double x3, const NormalizationConvention& norm = {});

  std::complex<double> value(double rho, double phi) const;
  double density(double rho, double phi) const { return std::norm(value(rho, phi)); }

 private:
  void ensure_levels(int top) const;

  const MagneticPacket* packet_;
  double tau_;
  double x3_;
  double prefactor_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::complex<double>> kernel_;
};

class MagneticPacket {
 public:
  explicit MagneticPacket(const MagneticCoherentState& state, const SeriesSpec& series = {},
                          const QuadratureSpec& quad = {}, ThetaPairing pairing = ThetaPairing::printed);

  const MagneticCoherentState& state() const { return state_; }
  const SeriesConstants& constants() const { return constants_; }
  const SeriesSpec& series_spec() const { return series_; }
  const QuadratureSpec& quadrature_spec() const { return quad_; }

  TransversePosition transverse_position(double tau) const;
  ParallelMotion parallel_motion(double tau) const;
  MomentumExpectations momentum_expectations(double tau) const;
  ConservedExpectations conserved_expectations() const;
  // (dx3)(dp3) at time tau
  double x3_uncertainty(double tau) const;

  std::complex<double> kg_field(double tau, double rho, double phi, double x3,
                                const NormalizationConvention& norm = {}) const;

  SeriesReport report() const;

 private:
  friend class FieldSlice;

  struct Expansion {
    std::vector<double> level_prob;  // by cyclotron level N
    std::vector<double> coupling;    // transverse coupling by level
    std::vector<double> mean_energy, mean_velocity, mean_velocity_sq;  // k3 averages by level
    double total = 0.0;
    double l3_positive = 0.0;
    double l3_negative = 0.0;
    double gc_sum = 0.0;  // sum P (2M + 1)
    SeriesReport report;
  };

  const Expansion& expansion() const;
  void expand(Expansion& e) const;

  MagneticCoherentState state_;
  SeriesSpec series_;
  QuadratureSpec quad_;
  ThetaPairing pairing_;
  SeriesConstants constants_;

  mutable std::once_flag once_;
  mutable std::unique_ptr<Expansion> expansion_;
};

struct NonrelExpectations {
  double x1, x2, x3;
  double p1, p2, p3;
  double x3dot;
  double R_sq;
  double E_mean;
};

NonrelExpectations nonrel_expectations(const MagneticCoherentState& s, double tau);

struct FreeLimitCheck {
  MomentSet series;  // from the Landau series at the given (small) Lambda
  MomentSet quoted;  // from the zero-field integrals
  double x1_mean = 0.0;
  double x2_mean = 0.0;
};

// Requires p1_mean = 0. x_mean, v_mean and E_mean refer to the x3 direction.
FreeLimitCheck free_limit_check(const MagneticCoherentState& s, double tau, const SeriesSpec& series = {},
                                const QuadratureSpec& quad = {});

}  // namespace kgcoh
