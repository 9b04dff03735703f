#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgcoh/quadrature.hpp"

namespace kgcoh {

// 1+1-D charged coherent packet. lambda is the inverse width in Compton
// units, alpha the initial mean position, p_mean the mean momentum and
// epsilon the charge parity.
struct FreeCoherentState {
  double lambda = 1.0;
  double alpha = 0.0;
  double p_mean = 0.0;
  int epsilon = 1;

  // Validates the invariants; throws InvalidArgument.
  static FreeCoherentState make(double lambda, double alpha, double p_mean, int epsilon = 1);

  // Set when the packet is narrower than a Compton wavelength.
  bool wide_momentum_warning() const { return lambda > 1.0; }
};

// The product kappa (1 + epsilon a) entering the field normalization.
struct NormalizationConvention {
  double kappa_times_one_plus_eps_a = 1.0;

  bool is_default() const { return kappa_times_one_plus_eps_a == 1.0; }
};

struct MomentSet {
  double tau = 0.0;
  std::optional<double> x_mean, x_var, p_mean, p_var, v_mean, v_var, E_mean, E_var,
      uncertainty_product;

  // (label, value) pairs for the fields that are set, in declaration order.
  std::vector<std::pair<std::string, double>> labeled() const;
};

struct VelocityMoments {
  double v_mean;
  double v_sq_mean;
  double v_var;
};

struct EnergyMoments {
  double E_mean;
  double E_sq_mean;
  double E_var;
};

std::complex<double> wavefn_x(const FreeCoherentState& s, double x);
std::complex<double> wavefn_p(const FreeCoherentState& s, double p);

MomentSet static_moments(const FreeCoherentState& s);
VelocityMoments velocity_moments(const FreeCoherentState& s, const QuadratureSpec& spec = {});
EnergyMoments energy_moments(const FreeCoherentState& s, const QuadratureSpec& spec = {});
MomentSet evolved_moments(const FreeCoherentState& s, double tau, const QuadratureSpec& spec = {});
MomentSet nonrel_moments(const FreeCoherentState& s, double tau);

// Probability density of the Foldy-representation packet.
double probability_density(const FreeCoherentState& s, double tau, double x,
                           const QuadratureSpec& spec = {});

// Value of the one-component KG field and its squared modulus.
std::complex<double> kg_field(const FreeCoherentState& s, double tau, double x,
                              const NormalizationConvention& norm = {},
                              const QuadratureSpec& spec = {});
double kg_density(const FreeCoherentState& s, double tau, double x,
                  const NormalizationConvention& norm = {}, const QuadratureSpec& spec = {});

}  // namespace kgcoh
