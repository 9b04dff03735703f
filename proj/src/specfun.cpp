#include "kgcoh/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kgcoh/errors.hpp"

namespace kgcoh {

double laguerre(int n, int alpha, double x) {
  if (n < 0 || alpha < 0) throw InvalidArgument("laguerre: n and alpha must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 2; k <= n; ++k) {
    double next = ((2.0 * k - 1.0 + alpha - x) * cur - (k - 1.0 + alpha) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre(const LaguerreOrder& order, double x) { return laguerre(order.n, order.alpha, x); }

std::vector<double> laguerre_column(int n_max, int alpha, double x) {
  if (n_max < 0 || alpha < 0) throw InvalidArgument("laguerre_column: n_max and alpha must be nonnegative");
  std::vector<double> out(n_max + 1);
  out[0] = 1.0;
  if (n_max >= 1) out[1] = 1.0 + alpha - x;
  for (int k = 2; k <= n_max; ++k)
    out[k] = ((2.0 * k - 1.0 + alpha - x) * out[k - 1] - (k - 1.0 + alpha) * out[k - 2]) / k;
  return out;
}

double log_fact_ratio(int n, int ell) {
  if (n < 0 || ell < 0) throw InvalidArgument("log_fact_ratio: arguments must be nonnegative");
  double sum = 0.0;
  for (int j = 1; j <= ell; ++j) sum -= std::log(static_cast<double>(n) + j);
  return sum;
}

ScaledLaguerreSequence::ScaledLaguerreSequence(int alpha, double s, double w, double log_scale)
    : alpha_(alpha), s_(s), w_(w) {
  if (alpha < 0) throw InvalidArgument("ScaledLaguerreSequence: alpha must be nonnegative");
  if (!(w >= 0.0)) throw InvalidArgument("ScaledLaguerreSequence: w must be nonnegative");
  if (w == 0.0 && alpha > 0) {
    cur_ = 0.0;
    factor_ = 0.0;
    return;
  }
  cur_ = 1.0;
  log_exp_ = log_scale - 0.5 * std::lgamma(alpha + 1.0);
  if (alpha > 0) log_exp_ += 0.5 * alpha * std::log(w);
  renormalize();
}

double ScaledLaguerreSequence::log_abs() const {
  if (cur_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(cur_)) + log_exp_;
}

void ScaledLaguerreSequence::advance() {
  const int k = k_ + 1;
  const double root = std::sqrt(static_cast<double>(k) * (k + alpha_));
  const double next =
      (((2.0 * k - 1.0 + alpha_) * s_ - w_) * cur_ - s_ * s_ * root_prev_ * prev_) / root;
  prev_ = cur_;
  cur_ = next;
  root_prev_ = root;
  k_ = k;
  const double a = std::abs(cur_);
  if (a > 1e150 || (a < 1e-150 && std::abs(prev_) < 1e-150 && (a > 0.0 || prev_ != 0.0)))
    renormalize();
}

void ScaledLaguerreSequence::renormalize() {
  double a = std::max(std::abs(cur_), std::abs(prev_));
  if (a > 0.0) {
    int e;
    std::frexp(a, &e);
    cur_ = std::ldexp(cur_, -e);
    prev_ = std::ldexp(prev_, -e);
    log_exp_ += e * std::numbers::ln2;
  }
  factor_ = log_exp_ < -745.0 ? 0.0 : std::exp(log_exp_);
}

}  // namespace kgcoh
