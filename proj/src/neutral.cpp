#include "kgcoh/neutral.hpp"

#include <cmath>

#include "kgcoh/errors.hpp"

namespace kgcoh {

NeutralCoherentState NeutralCoherentState::make(double lambda, double alpha, double p_mean) {
  return {FreeCoherentState::make(lambda, alpha, p_mean, +1)};
}

FreeCoherentState partner(const NeutralCoherentState& s) {
  if (s.base.epsilon != 1) throw InvalidArgument("neutral state: base must have epsilon = +1");
  FreeCoherentState p = s.base;
  p.epsilon = -1;
  p.p_mean = -s.base.p_mean;
  return p;
}

double physical_momentum(const FreeCoherentState& s) { return s.epsilon * s.p_mean; }

std::complex<double> neutral_field(const NeutralCoherentState& s, double tau, double x,
                                   const QuadratureSpec& spec, const NormalizationConvention& norm) {
  const auto plus = kg_field(s.base, tau, x, norm, spec);
  const auto minus = kg_field(partner(s), tau, x, norm, spec);
  return (plus + minus) / std::sqrt(2.0);
}

}  // namespace kgcoh
