#pragma once

#include <vector>

namespace kgcoh {

struct LaguerreOrder {
  int n = 0;
  int alpha = 0;
};

// Associated Laguerre polynomial L_n^alpha(x) by upward recurrence.
double laguerre(int n, int alpha, double x);
double laguerre(const LaguerreOrder& order, double x);

// L_0^alpha(x) .. L_{n_max}^alpha(x).
std::vector<double> laguerre_column(int n_max, int alpha, double x);

// ln(n! / (n+ell)!)
double log_fact_ratio(int n, int ell);

// Generates the normalized sequence
//
//   c_k = e^{log_scale} sqrt(k!/(k+alpha)!) w^{alpha/2} s^k L_k^alpha(w/s),  k = 0, 1, ...
//
// for w >= 0. The product s^k L_k^alpha(w/s) is a polynomial in (s, w), so
// s = 0 is regular. With s = 1, w = v and log_scale = -v/2 the terms are the
// orthonormal Laguerre functions. Mantissas are kept in range by rescaling, so
// values far below the double range come back as 0 without disturbing the
// recurrence.
class ScaledLaguerreSequence {
 public:
  ScaledLaguerreSequence(int alpha, double s, double w, double log_scale);

  int index() const { return k_; }
  double value() const { return cur_ * factor_; }
  // log |c_k|; -infinity for an exact zero
  double log_abs() const;
  void advance();

 private:
  void renormalize();

  int alpha_;
  double s_;
  double w_;
  int k_ = 0;
  double prev_ = 0.0;
  double cur_ = 0.0;
  double log_exp_ = 0.0;
  double factor_ = 0.0;
  double root_prev_ = 0.0;  // sqrt(k (k + alpha)) at the current k
};

}  // namespace kgcoh
