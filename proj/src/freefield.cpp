#include "kgcoh/freefield.hpp"

#include <cmath>
#include <numbers>

#include "kgcoh/errors.hpp"

namespace kgcoh {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// Weight e^{-2 (p - p_mean)^2 / lambda^2} of the momentum distribution.
GaussianWeight momentum_weight(const FreeCoherentState& s) {
  return {s.p_mean, 2.0 / (s.lambda * s.lambda)};
}

// Integral of h(p) e^{-(p - p_mean)^2/lambda^2} e^{i[p(x - alpha) - eps tau sqrt(1+p^2)]}.
template <class H>
cplx evolved_amplitude(const FreeCoherentState& s, double tau, double x, H&& h,
                       const QuadratureSpec& spec, const char* what) {
  GaussianWeight w{s.p_mean, 1.0 / (s.lambda * s.lambda)};
  const double dx = x - s.alpha;
  const double et = s.epsilon * tau;
  auto r = integrate_gaussian(
      w,
      [&](double p) {
        double e = std::sqrt(1.0 + p * p);
        return h(e) * std::polar(1.0, p * dx - et * e);
      },
      spec);
  return require_converged(r, what);
}

}  // namespace

FreeCoherentState FreeCoherentState::make(double lambda, double alpha, double p_mean, int epsilon) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("free state: lambda must be > 0");
  if (epsilon != 1 && epsilon != -1) throw InvalidArgument("free state: epsilon must be +1 or -1");
  if (!std::isfinite(alpha) || !std::isfinite(p_mean)) throw InvalidArgument("free state: non-finite parameter");
  return {lambda, alpha, p_mean, epsilon};
}

std::vector<std::pair<std::string, double>> MomentSet::labeled() const {
  std::vector<std::pair<std::string, double>> out{{"tau", tau}};
  auto add = [&](const char* name, const std::optional<double>& v) {
    if (v) out.emplace_back(name, *v);
  };
  add("x_mean", x_mean);
  add("x_var", x_var);
  add("p_mean", p_mean);
  add("p_var", p_var);
  add("v_mean", v_mean);
  add("v_var", v_var);
  add("E_mean", E_mean);
  add("E_var", E_var);
  add("uncertainty_product", uncertainty_product);
  return out;
}

cplx wavefn_x(const FreeCoherentState& s, double x) {
  const double l2 = s.lambda * s.lambda;
  const double amp = std::pow(l2 / (2.0 * kPi), 0.25) * std::exp(-l2 * (x - s.alpha) * (x - s.alpha) / 4.0);
  return std::polar(amp, s.p_mean * x - 0.5 * s.p_mean * s.alpha);
}

cplx wavefn_p(const FreeCoherentState& s, double p) {
  const double l2 = s.lambda * s.lambda;
  const double amp = std::pow(2.0 / (kPi * l2), 0.25) * std::exp(-(p - s.p_mean) * (p - s.p_mean) / l2);
  return std::polar(amp, 0.5 * s.p_mean * s.alpha - s.alpha * p);
}

MomentSet static_moments(const FreeCoherentState& s) {
  MomentSet m;
  m.tau = 0.0;
  m.x_mean = s.alpha;
  m.p_mean = s.p_mean;
  m.x_var = 1.0 / (s.lambda * s.lambda);
  m.p_var = s.lambda * s.lambda / 4.0;
  m.uncertainty_product = 0.5;
  return m;
}

VelocityMoments velocity_moments(const FreeCoherentState& s, const QuadratureSpec& spec) {
  const GaussianWeight w = momentum_weight(s);
  double v = require_converged(
      gaussian_average(w, [](double p) { return p / std::sqrt(1.0 + p * p); }, spec), "velocity mean");
  double v2 = require_converged(
      gaussian_average(w, [](double p) { return p * p / (1.0 + p * p); }, spec), "velocity second moment");
  v *= s.epsilon;
  return {v, v2, std::max(0.0, v2 - v * v)};
}

EnergyMoments energy_moments(const FreeCoherentState& s, const QuadratureSpec& spec) {
  const GaussianWeight w = momentum_weight(s);
  double e = require_converged(
      gaussian_average(w, [](double p) { return std::sqrt(1.0 + p * p); }, spec), "energy mean");
  double e2 = 1.0 + s.p_mean * s.p_mean + s.lambda * s.lambda / 4.0;
  return {e, e2, std::max(0.0, e2 - e * e)};
}

MomentSet evolved_moments(const FreeCoherentState& s, double tau, const QuadratureSpec& spec) {
  MomentSet m = static_moments(s);
  const VelocityMoments v = velocity_moments(s, spec);
  const EnergyMoments e = energy_moments(s, spec);
  const double spread = 1.0 + s.lambda * s.lambda * v.v_var * tau * tau;
  m.tau = tau;
  m.x_mean = s.alpha + v.v_mean * tau;
  m.x_var = spread / (s.lambda * s.lambda);
  m.v_mean = v.v_mean;
  m.v_var = v.v_var;
  m.E_mean = e.E_mean;
  m.E_var = e.E_var;
  m.uncertainty_product = 0.5 * std::sqrt(spread);
  return m;
}

MomentSet nonrel_moments(const FreeCoherentState& s, double tau) {
  MomentSet m = static_moments(s);
  const double l2 = s.lambda * s.lambda;
  const double spread = 1.0 + l2 * l2 * tau * tau / 4.0;
  m.tau = tau;
  m.x_mean = s.alpha + s.p_mean * tau;
  m.x_var = spread / l2;
  m.v_mean = s.p_mean;
  m.v_var = l2 / 4.0;
  m.E_mean = 1.0 + l2 / 8.0 + s.p_mean * s.p_mean / 2.0;
  m.uncertainty_product = 0.5 * std::sqrt(spread);
  return m;
}

double probability_density(const FreeCoherentState& s, double tau, double x, const QuadratureSpec& spec) {
  cplx st = evolved_amplitude(s, tau, x, [](double) { return 1.0; }, spec, "probability density");
  return std::norm(st) / (s.lambda * kPi * std::sqrt(2.0 * kPi));
}

cplx kg_field(const FreeCoherentState& s, double tau, double x, const NormalizationConvention& norm,
              const QuadratureSpec& spec) {
  if (!(norm.kappa_times_one_plus_eps_a > 0.0))
    throw InvalidArgument("normalization convention must be positive");
  cplx uv = evolved_amplitude(s, tau, x, [](double e) { return 1.0 / std::sqrt(e); }, spec, "KG field");
  const double pref = std::pow(2.0 / (kPi * s.lambda * s.lambda), 0.25) /
                      std::sqrt(2.0 * kPi * norm.kappa_times_one_plus_eps_a);
  return pref * std::polar(1.0, 0.5 * s.p_mean * s.alpha) * uv;
}

double kg_density(const FreeCoherentState& s, double tau, double x, const NormalizationConvention& norm,
                  const QuadratureSpec& spec) {
  return std::norm(kg_field(s, tau, x, norm, spec));
}

}  // namespace kgcoh
