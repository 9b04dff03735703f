#include "kgcoh/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace kgcoh {

void QuadratureSpec::validate() const {
  if (initial_nodes < 1 || max_nodes < 1 || initial_nodes > max_nodes)
    throw InvalidArgument("quadrature spec: need 1 <= initial_nodes <= max_nodes");
  if (max_nodes > kMaxHermiteNodes)
    throw InvalidArgument("quadrature spec: max_nodes exceeds " + std::to_string(kMaxHermiteNodes));
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw InvalidArgument("quadrature spec: tolerances must be positive");
}

namespace {

struct HermiteEval {
  double ratio;       // psi_n / psi_{n-1}
  double log_abs_prev;  // log |psi_{n-1}|
};

// Orthonormal Hermite functions psi_k(x) = p_k(x) e^{-x^2/2}, run upward with
// periodic rescaling so the far nodes of large rules do not underflow.
HermiteEval hermite_functions(int n, double x) {
  double log_scale = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 1; k <= n; ++k) {
    double next = x * std::sqrt(2.0 / k) * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
    double a = std::abs(cur);
    if (a > 1e150) {
      prev /= a;
      cur /= a;
      log_scale += std::log(a);
    }
  }
  return {cur / prev, std::log(std::abs(prev)) + log_scale};
}

// Root of 2 phi - sin(2 phi) = t on [0, pi/2].
double kepler_angle(double t) {
  double lo = 0.0, hi = 0.5 * std::numbers::pi;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (2.0 * mid - std::sin(2.0 * mid) < t)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Newton-polished root near x; returns the root and its weight.
std::pair<double, double> polish(int n, double x) {
  for (int it = 0; it < 12; ++it) {
    HermiteEval h = hermite_functions(n, x);
    double dx = h.ratio / std::sqrt(2.0 * n);
    x -= dx;
    if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  HermiteEval h = hermite_functions(n, x);
  double log_w = -x * x - std::log(static_cast<double>(n)) - 2.0 * h.log_abs_prev;
  return {x, log_w < -745.0 ? 0.0 : std::exp(log_w)};
}

bool well_formed(const HermiteRule& r) {
  double sum = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    if (i > 0 && !(r.nodes[i] > r.nodes[i - 1])) return false;
    sum += r.weights[i];
  }
  return std::abs(sum / std::sqrt(std::numbers::pi) - 1.0) < 1e-12;
}

std::shared_ptr<const HermiteRule> build_rule(int n, bool use_eigensolver) {
  auto rule = std::make_shared<HermiteRule>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  if (n == 1) {
    rule->nodes[0] = 0.0;
    rule->weights[0] = std::sqrt(std::numbers::pi);
    return rule;
  }

  Eigen::VectorXd ev;
  if (use_eigensolver) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    ev = es.eigenvalues();
  }

  const double nu = 2.0 * n + 1.0;
  for (int k = 1; k <= n / 2; ++k) {
    // k-th largest root; mirrored for exact symmetry
    double guess = use_eigensolver
                       ? ev[n - k]
                       : std::sqrt(nu) * std::cos(kepler_angle(std::numbers::pi * (4.0 * k - 1.0) / nu));
    // far tail: the weight underflows, so the Newton polish is skipped
    auto [x, w] = guess * guess > 760.0 ? std::pair{guess, 0.0} : polish(n, guess);
    rule->nodes[n - k] = x;
    rule->weights[n - k] = w;
    rule->nodes[k - 1] = -x;
    rule->weights[k - 1] = w;
  }
  if (n % 2 == 1) {
    auto [x, w] = polish(n, 0.0);
    rule->nodes[n / 2] = 0.0;
    rule->weights[n / 2] = w;
  }
  return rule;
}

std::shared_ptr<const HermiteRule> build_rule(int n) {
  auto rule = build_rule(n, false);
  if (!well_formed(*rule)) rule = build_rule(n, true);
  return rule;
}

}  // namespace

std::shared_ptr<const HermiteRule> hermite_rule(int n) {
  if (n < 1 || n > kMaxHermiteNodes)
    throw InvalidArgument("hermite_rule: n must lie in [1, " + std::to_string(kMaxHermiteNodes) + "]");

  static std::shared_mutex mutex;
  static std::map<int, std::shared_ptr<const HermiteRule>> cache;
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  auto rule = build_rule(n);
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(n, std::move(rule));
  return it->second;
}

std::pair<std::vector<double>, std::vector<double>> hermite_nodes(int n) {
  auto r = hermite_rule(n);
  return {r->nodes, r->weights};
}

}  // namespace kgcoh
