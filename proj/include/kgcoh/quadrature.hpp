#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "kgcoh/errors.hpp"

namespace kgcoh {

struct QuadratureSpec {
  int initial_nodes = 64;
  int max_nodes = 8192;
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;

  void validate() const;
};

// Weight e^{-a (p - p0)^2}.
struct GaussianWeight {
  double center = 0.0;
  double inv_width_sq = 1.0;

  // Integral of the weight over the real line.
  double mass() const { return std::sqrt(std::numbers::pi / inv_width_sq); }
};

struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxHermiteNodes = 16384;

// n-point Gauss-Hermite rule for weight e^{-t^2}. Tables are cached and
// shared between threads; the returned rule is immutable.
std::shared_ptr<const HermiteRule> hermite_rule(int n);

// Convenience copy of hermite_rule(n).
std::pair<std::vector<double>, std::vector<double>> hermite_nodes(int n);

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int nodes = 0;
  bool converged = false;
};

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
}  // namespace detail

// Integral of g(p) e^{-a (p - p0)^2} over the real line. The node count is
// doubled from spec.initial_nodes until two successive estimates agree.
// On failure the last estimate is returned with converged = false.
template <class F>
auto integrate_gaussian(const GaussianWeight& w, F&& g, const QuadratureSpec& spec = {})
    -> QuadResult<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, std::complex<double>>,
                "integrand must return double or std::complex<double>");
  if (!(w.inv_width_sq > 0.0)) throw InvalidArgument("gaussian weight: inv_width_sq must be > 0");
  spec.validate();

  const double scale = 1.0 / std::sqrt(w.inv_width_sq);
  auto apply = [&](int n) {
    auto rule = hermite_rule(n);
    T sum{};
    const auto& t = rule->nodes;
    const auto& wt = rule->weights;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (wt[i] == 0.0) continue;
      sum += wt[i] * g(w.center + t[i] * scale);
    }
    return T(sum * scale);
  };

  QuadResult<T> r;
  int n = spec.initial_nodes;
  T prev = apply(n);
  r.value = prev;
  r.nodes = n;
  r.error = detail::magnitude(prev);
  while (2 * n <= spec.max_nodes) {
    n *= 2;
    T cur = apply(n);
    double diff = detail::magnitude(cur - prev);
    r.value = cur;
    r.nodes = n;
    r.error = diff;
    if (diff <= std::max(spec.rel_tol * detail::magnitude(cur), spec.abs_tol)) {
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  return r;
}

// Normalized average of g under the weight: integral / weight mass.
template <class F>
auto gaussian_average(const GaussianWeight& w, F&& g, const QuadratureSpec& spec = {}) {
  auto r = integrate_gaussian(w, std::forward<F>(g), spec);
  const double m = w.mass();
  r.value /= m;
  r.error /= m;
  return r;
}

// Unwraps a result, throwing NonConvergence if the tolerance was not met.
template <class T>
T require_converged(const QuadResult<T>& r, const std::string& what) {
  if (!r.converged) {
    double best;
    if constexpr (std::is_same_v<T, double>)
      best = r.value;
    else
      best = std::abs(r.value);
    throw NonConvergence(what + ": quadrature did not converge within " +
                             std::to_string(r.nodes) + " nodes",
                         best, r.error);
  }
  return r.value;
}

}  // namespace kgcoh
