#pragma once

#include <complex>

#include "kgcoh/freefield.hpp"

namespace kgcoh {

// Neutral packet built from an epsilon = +1 state and its charge-conjugate
// partner (same alpha and lambda, opposite p_mean).
struct NeutralCoherentState {
  FreeCoherentState base;

  static NeutralCoherentState make(double lambda, double alpha, double p_mean);
};

FreeCoherentState partner(const NeutralCoherentState& s);

// Expectation of the physical momentum epsilon * p for a charged state.
double physical_momentum(const FreeCoherentState& s);

// (psi_+ + psi_-)/sqrt(2). The field is real only under the default
// normalization; other conventions are accepted but the result is complex.
std::complex<double> neutral_field(const NeutralCoherentState& s, double tau, double x,
                                   const QuadratureSpec& spec = {},
                                   const NormalizationConvention& norm = {});

}  // namespace kgcoh
