#include "kgcoh/magnetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kgcoh/errors.hpp"
#include "kgcoh/specfun.hpp"

namespace kgcoh {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// Watches a stream of nonnegative magnitudes, given by their logarithms so
// that values below the double range still order correctly, and reports when
// the geometric estimate of what is left falls below tol times a reference.
class TailMonitor {
 public:
  TailMonitor(double tol, int needed) : log_tol_(std::log(tol)), needed_(needed) {}

  bool feed(double log_x, double reference) {
    const double x = std::exp(log_x);
    sum_ += x;
    if (index_ == 0 || log_x > log_peak_) {
      log_peak_ = log_x;
      peak_index_ = index_;
    }
    const bool past_peak = index_ > peak_index_;
    double ratio = 0.0;
    if (log_x > kNegInf) ratio = log_prev_ > kNegInf ? std::exp(log_x - log_prev_) : kInf;
    log_prev_ = log_x;
    ++index_;
    if (past_peak && ratio < 1.0) {
      const double log_rem = ratio > 0.0 ? log_x + std::log(ratio / (1.0 - ratio)) : kNegInf;
      if (log_rem <= log_tol_ + std::log(reference)) return ++count_ >= needed_;
    }
    count_ = 0;
    return false;
  }

  double sum() const { return sum_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double log_tol_;
  int needed_;
  double sum_ = 0.0;
  double log_peak_ = kNegInf;
  long long peak_index_ = 0;
  long long index_ = 0;
  double log_prev_ = kNegInf;
  int count_ = 0;
};

double log_or_neg_inf(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

struct Box {
  long long n_hi;
  long long alpha_hi;
};

// Generous bounds on the (n, |ell|) region from the Gaussian moments of the
// transverse kinetic momentum and of the guiding center.
Box series_box(const MagneticCoherentState& st) {
  const double L = st.Lambda, l2 = st.lambda_perp * st.lambda_perp, p = st.p1_mean;
  const double var_pi = l2 / 4.0 + L * L / (4.0 * l2);
  const double mean_n = (p * p + 2.0 * var_pi) / (2.0 * L);
  const double sd_n = std::sqrt(4.0 * p * p * var_pi + 4.0 * var_pi * var_pi) / (2.0 * L);
  const double hi = mean_n + 40.0 * sd_n + 100.0;
  const double capped = std::min(hi, 4e9);
  return {static_cast<long long>(capped), static_cast<long long>(capped)};
}

double neumaier_sum(const std::vector<double>& v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

void add_at(std::vector<double>& v, std::size_t i, double x) {
  if (i >= v.size()) v.resize(i + 1, 0.0);
  v[i] += x;
}

GaussianWeight parallel_weight(const MagneticCoherentState& s) {
  return {s.p3_mean, 2.0 / (s.lambda3 * s.lambda3)};
}

}  // namespace

MagneticCoherentState MagneticCoherentState::make(double Lambda, double lambda_perp, double lambda3,
                                                  double p1_mean, double p3_mean) {
  if (!(Lambda > 0.0) || !(lambda_perp > 0.0) || !(lambda3 > 0.0))
    throw InvalidArgument("magnetic state: Lambda, lambda_perp and lambda3 must be > 0");
  if (!(p1_mean >= 0.0)) throw InvalidArgument("magnetic state: p1_mean must be >= 0");
  if (!std::isfinite(p3_mean) || !std::isfinite(p1_mean) || !std::isfinite(Lambda))
    throw InvalidArgument("magnetic state: non-finite parameter");
  return {Lambda, lambda_perp, lambda3, p1_mean, p3_mean};
}

double MagneticCoherentState::Pi() const { return std::hypot(p1_mean, p3_mean); }

void SeriesSpec::validate() const {
  if (n_max < 1 || ell_max < 1) throw InvalidArgument("series spec: n_max and ell_max must be positive");
  if (!(tail_tol > 0.0) || !(mass_tol > 0.0)) throw InvalidArgument("series spec: tolerances must be positive");
  if (consecutive_below < 1) throw InvalidArgument("series spec: consecutive_below must be positive");
}

SeriesConstants series_constants(const MagneticCoherentState& st) {
  if (!(st.Lambda > 0.0) || !(st.lambda_perp > 0.0))
    throw InvalidArgument("series_constants: Lambda and lambda_perp must be > 0");
  const double L = st.Lambda, l2 = st.lambda_perp * st.lambda_perp, p = st.p1_mean;
  const double sum = L + l2;
  SeriesConstants c;
  c.matched_width = std::abs(l2 - L) < 1e-12 * L;
  c.s = c.matched_width ? 0.0 : (L - l2) / sum;
  c.su = 2.0 * L * p * p / (sum * sum);
  c.u = c.matched_width ? 0.0 : 2.0 * L * p * p / ((L - l2) * sum);
  const double gauss = std::exp(-2.0 * p * p / sum);
  const double norm3 = std::sqrt(2.0 / kPi) / st.lambda3;
  c.E_amp = norm3 * 4.0 * l2 * L / (sum * sum) * gauss;
  c.F_amp = norm3 * 8.0 * l2 * L * p / (sum * sum * sum) * gauss;
  c.log_C = std::log(4.0 * l2 * L / (sum * sum)) - 2.0 * p * p / sum;
  return c;
}

int landau_level(int n, int ell) { return n + (std::abs(ell) - ell) / 2; }

double landau_energy(const LandauMode& m, double Lambda) {
  return 1.0 + m.k3 * m.k3 + Lambda * (2.0 * m.n + 1.0 - m.ell + std::abs(m.ell));
}

MagneticPacket::MagneticPacket(const MagneticCoherentState& state, const SeriesSpec& series,
                               const QuadratureSpec& quad, ThetaPairing pairing)
    : state_(MagneticCoherentState::make(state.Lambda, state.lambda_perp, state.lambda3, state.p1_mean,
                                         state.p3_mean)),
      series_(series),
      quad_(quad),
      pairing_(pairing),
      constants_(series_constants(state_)) {
  series_.validate();
  quad_.validate();
}

const MagneticPacket::Expansion& MagneticPacket::expansion() const {
  std::call_once(once_, [this] {
    auto e = std::make_unique<Expansion>();
    expand(*e);
    expansion_ = std::move(e);
  });
  return *expansion_;
}

void MagneticPacket::expand(Expansion& e) const {
  const SeriesConstants& c = constants_;
  const Box box = series_box(state_);
  const long long n_cap = std::min<long long>(box.n_hi, series_.n_max);
  const long long alpha_cap = std::min<long long>(box.alpha_hi, series_.ell_max);
  const double tol = series_.tail_tol;

  auto run = [&](bool strict) {
    e = Expansion{};
    std::vector<double> prev_col, col;
    TailMonitor columns(tol, series_.consecutive_below);
    double running = 0.0;
    bool column_cap_hit = false;
    int alpha = 0;
    for (; alpha <= alpha_cap; ++alpha) {
      ScaledLaguerreSequence seq(alpha, c.s, c.su, 0.5 * c.log_C);
      TailMonitor rows(tol, series_.consecutive_below);
      col.clear();
      for (long long n = 0;; ++n) {
        const double b = seq.value();
        col.push_back(b);
        const double p = b * b;
        if (p > 0.0) {
          if (alpha == 0) {
            add_at(e.level_prob, n, p);
            e.gc_sum += p * (2.0 * n + 1.0);
          } else {
            add_at(e.level_prob, n, p);
            add_at(e.level_prob, n + alpha, p);
            e.gc_sum += p * (2.0 * (n + alpha) + 1.0) + p * (2.0 * n + 1.0);
            e.l3_positive += alpha * p;
            e.l3_negative += alpha * p;
          }
        }
        ++e.report.terms;
        e.report.max_n = std::max<int>(e.report.max_n, static_cast<int>(n));
        const double reference = strict ? rows.sum() + p : std::max(rows.sum() + p, running);
        if (rows.feed(2.0 * seq.log_abs(), reference)) break;
        if (n >= n_cap) {
          if (p > tol * std::max(rows.sum(), running)) column_cap_hit = true;
          break;
        }
        seq.advance();
      }
      const double mass = (alpha == 0 ? 1.0 : 2.0) * rows.sum();
      running += mass;

      if (alpha > 0) {
        // pairs (alpha-1, alpha): first sum at level n + alpha - 1, second at n
        // (printed) or n + alpha - 1 (symmetric)
        const int ell = alpha - 1;
        const std::size_t m = std::min(prev_col.size(), col.size());
        for (std::size_t n = 0; n < m; ++n)
          add_at(e.coupling, n + ell, prev_col[n] * col[n] * std::sqrt(n + ell + 1.0));
        for (std::size_t n = 0; n < m && n + 1 < prev_col.size(); ++n) {
          const std::size_t key = pairing_ == ThetaPairing::printed ? n : n + ell;
          add_at(e.coupling, key, -prev_col[n + 1] * col[n] * std::sqrt(n + 1.0));
        }
      }
      std::swap(prev_col, col);
      if (columns.feed(log_or_neg_inf(mass), running)) break;
    }
    if (alpha > alpha_cap) column_cap_hit = true;
    e.report.columns = alpha + 1;
    e.total = neumaier_sum(e.level_prob);
    return !column_cap_hit && std::abs(1.0 - e.total) <= series_.mass_tol;
  };

  if (!run(false) && !run(true)) {
    throw NonConvergence("Landau series: total probability " + std::to_string(e.total) +
                             " misses 1 by more than the allowed tolerance",
                         e.total, std::abs(1.0 - e.total));
  }

  // k3 averages per level
  const GaussianWeight w = parallel_weight(state_);
  const std::size_t levels = e.level_prob.size();
  e.mean_energy.assign(levels, 0.0);
  e.mean_velocity.assign(levels, 0.0);
  e.mean_velocity_sq.assign(levels, 0.0);
  const double L = state_.Lambda;
  for (std::size_t N = 0; N < levels; ++N) {
    if (e.level_prob[N] == 0.0) continue;
    const double gap = L * (2.0 * N + 1.0) + 1.0;
    e.mean_energy[N] = require_converged(
        gaussian_average(w, [gap](double k) { return std::sqrt(gap + k * k); }, quad_), "level energy");
    e.mean_velocity[N] = require_converged(
        gaussian_average(w, [gap](double k) { return k / std::sqrt(gap + k * k); }, quad_), "level velocity");
    e.mean_velocity_sq[N] = require_converged(
        gaussian_average(w, [gap](double k) { return k * k / (gap + k * k); }, quad_), "level velocity^2");
  }
  e.report.max_level = static_cast<int>(levels) - 1;
  e.report.total_probability = e.total;
}

SeriesReport MagneticPacket::report() const { return expansion().report; }

TransversePosition MagneticPacket::transverse_position(double tau) const {
  const double p1 = state_.p1_mean, L = state_.Lambda;
  if (p1 == 0.0) return {0.0, 0.0};
  const Expansion& e = expansion();
  const GaussianWeight w = parallel_weight(state_);
  double sx = 0.0, sy = 0.0;
  for (std::size_t N = 0; N < e.coupling.size(); ++N) {
    const double d = e.coupling[N];
    if (d == 0.0) continue;
    cplx avg;
    if (tau == 0.0) {
      avg = 1.0;
    } else {
      const double lo = L * (2.0 * N + 1.0) + 1.0, hi = L * (2.0 * N + 3.0) + 1.0;
      avg = require_converged(gaussian_average(
                                  w,
                                  [&](double k) {
                                    const double k2 = k * k;
                                    // difference of roots without cancellation
                                    const double theta = tau * 2.0 * L / (std::sqrt(hi + k2) + std::sqrt(lo + k2));
                                    return std::polar(1.0, theta);
                                  },
                                  quad_),
                              "transverse phase average");
    }
    sx += d * avg.imag();
    sy += d * avg.real();
  }
  const double f = std::sqrt(2.0 / L);
  return {f * sx, -p1 / L + f * sy};
}

ParallelMotion MagneticPacket::parallel_motion(double tau) const {
  const Expansion& e = expansion();
  double v = 0.0, v2 = 0.0;
  for (std::size_t N = 0; N < e.level_prob.size(); ++N) {
    v += e.level_prob[N] * e.mean_velocity[N];
    v2 += e.level_prob[N] * e.mean_velocity_sq[N];
  }
  return {tau * v, v, v2};
}

MomentumExpectations MagneticPacket::momentum_expectations(double tau) const {
  const TransversePosition x = transverse_position(tau);
  const double L = state_.Lambda;
  MomentumExpectations m{};
  m.p1 = state_.p1_mean + 0.5 * L * x.x2_mean;
  m.p2 = -0.5 * L * x.x1_mean;
  m.p3 = state_.p3_mean;
  m.Pi1 = m.p1 + 0.5 * L * x.x2_mean;
  m.Pi2 = m.p2 - 0.5 * L * x.x1_mean;
  const Vec2 gc = gyration_center(L, {x.x1_mean, x.x2_mean}, {m.p1, m.p2});
  m.x1_gc = gc[0];
  m.x2_gc = gc[1];
  return m;
}

ConservedExpectations MagneticPacket::conserved_expectations() const {
  const Expansion& e = expansion();
  const double L = state_.Lambda, l2 = state_.lambda_perp * state_.lambda_perp, p1 = state_.p1_mean;
  ConservedExpectations r{};
  for (std::size_t N = 0; N < e.level_prob.size(); ++N) {
    const double p = e.level_prob[N];
    r.E_mean += p * e.mean_energy[N];
    r.R_mean += p * std::sqrt((2.0 * N + 1.0) / L);
    r.R_sq_mean += p * (2.0 * N + 1.0) / L;
  }
  r.L3_mean = e.l3_positive - e.l3_negative;
  r.R_var = std::max(0.0, r.R_sq_mean - r.R_mean * r.R_mean);
  r.R_gc_sq_mean = e.gc_sum / L;
  const double width_term = (L * L + l2 * l2) / (2.0 * L * L * l2);
  r.R_sq_closed = p1 * p1 / (L * L) + width_term;
  r.R_sq_closed_second_moment = (p1 * p1 + l2 / 4.0) / (L * L) + width_term;
  r.total_probability = e.total;
  return r;
}

double MagneticPacket::x3_uncertainty(double tau) const {
  const ParallelMotion m = parallel_motion(0.0);
  const double var = std::max(0.0, m.x3dot_sq_mean - m.x3dot_mean * m.x3dot_mean);
  const double l3 = state_.lambda3;
  return 0.5 * std::sqrt(1.0 + l3 * l3 * var * tau * tau);
}

cplx MagneticPacket::kg_field(double tau, double rho, double phi, double x3,
                              const NormalizationConvention& norm) const {
  return FieldSlice(*this, tau, x3, norm).value(rho, phi);
}

FieldSlice::FieldSlice(const MagneticPacket& packet, double tau, double x3, const NormalizationConvention& norm)
    : packet_(&packet), tau_(tau), x3_(x3) {
  if (!(norm.kappa_times_one_plus_eps_a > 0.0))
    throw InvalidArgument("normalization convention must be positive");
  const auto& st = packet.state();
  prefactor_ = std::sqrt(st.Lambda * std::sqrt(2.0 / kPi) / st.lambda3) /
               (2.0 * kPi * std::sqrt(norm.kappa_times_one_plus_eps_a));
}

void FieldSlice::ensure_levels(int top) const {
  {
    std::shared_lock lock(mutex_);
    if (static_cast<int>(kernel_.size()) > top) return;
  }
  std::unique_lock lock(mutex_);
  const auto& st = packet_->state();
  const GaussianWeight w{st.p3_mean, 1.0 / (st.lambda3 * st.lambda3)};
  const double L = st.Lambda;
  std::size_t start = kernel_.size();
  // grow in chunks so repeated small extensions stay cheap
  std::size_t target = std::max<std::size_t>(top + 1, start + start / 4 + 64);
  kernel_.resize(target);
  for (std::size_t N = start; N < target; ++N) {
    const double gap = L * (2.0 * N + 1.0) + 1.0;
    auto r = integrate_gaussian(
        w,
        [&](double k) {
          const double e2 = gap + k * k;
          const double e = std::sqrt(e2);
          return std::polar(1.0 / std::sqrt(e), k * x3_ - tau_ * e);
        },
        packet_->quadrature_spec());
    kernel_[N] = require_converged(r, "field kernel");
  }
}

cplx FieldSlice::value(double rho, double phi) const {
  if (!(rho >= 0.0)) throw InvalidArgument("kg_field: rho must be >= 0");
  const auto& st = packet_->state();
  const SeriesConstants& c = packet_->constants();
  const SeriesSpec& spec = packet_->series_spec();
  const double v = 0.5 * st.Lambda * rho * rho;
  const Box box = series_box(st);
  const long long n_cap = std::min<long long>(box.n_hi, spec.n_max);

  cplx total = 0.0;
  double running = 0.0;
  double biggest = 0.0;
  TailMonitor columns(spec.tail_tol, spec.consecutive_below);
  int quiet = 0;
  std::vector<double> b_col, f_col;
  for (int alpha = 0; alpha <= spec.ell_max; ++alpha) {
    if (v == 0.0 && alpha > 0) break;
    // amplitude column, cut like the probability series
    ScaledLaguerreSequence bseq(alpha, c.s, c.su, 0.5 * c.log_C);
    ScaledLaguerreSequence fseq(alpha, 1.0, v, -0.5 * v);
    TailMonitor rows(spec.tail_tol, spec.consecutive_below);
    b_col.clear();
    f_col.clear();
    for (long long n = 0;; ++n) {
      const double b = bseq.value();
      b_col.push_back(b);
      f_col.push_back(fseq.value());
      const double p = b * b;
      if (rows.feed(2.0 * bseq.log_abs(), rows.sum() + p)) break;
      if (n >= n_cap) {
        if (p > spec.tail_tol * rows.sum())
          throw NonConvergence("KG field: amplitude column " + std::to_string(alpha) +
                                   " still significant at n_max",
                               std::abs(prefactor_ * total), p);
        break;
      }
      bseq.advance();
      fseq.advance();
    }
    const double mass = (alpha == 0 ? 1.0 : 2.0) * rows.sum();
    running += mass;
    const int top = static_cast<int>(b_col.size()) - 1 + alpha;
    ensure_levels(top);

    cplx plus = 0.0, minus = 0.0;
    double size = 0.0;
    {
      std::shared_lock lock(mutex_);
      for (std::size_t n = 0; n < b_col.size(); ++n) {
        double t = b_col[n] * f_col[n];
        if (n % 2 == 1) t = -t;
        plus += t * kernel_[n];
        if (alpha > 0) minus += t * kernel_[n + alpha];
        size += std::abs(t);
      }
    }
    cplx contrib;
    if (alpha == 0) {
      contrib = plus;
    } else {
      static const cplx unit_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      contrib = unit_powers[alpha % 4] *
                (std::polar(1.0, alpha * phi) * plus + std::polar(1.0, -alpha * phi) * minus);
      size *= 2.0;
    }
    total += contrib;
    biggest = std::max(biggest, size);

    // beyond the classically allowed radius the radial functions die off
    const double reach = v + 2.0 * std::sqrt(static_cast<double>(b_col.size()) * v);
    if (alpha > reach && size <= spec.tail_tol * biggest) {
      if (++quiet >= spec.consecutive_below) break;
    } else {
      quiet = 0;
    }
    // amplitudes exhausted
    if (columns.feed(log_or_neg_inf(mass), running)) break;
  }
  return prefactor_ * total;
}

NonrelExpectations nonrel_expectations(const MagneticCoherentState& s, double tau) {
  const double L = s.Lambda, p1 = s.p1_mean, l2 = s.lambda_perp * s.lambda_perp;
  NonrelExpectations r{};
  r.x1 = p1 / L * std::sin(L * tau);
  r.x2 = p1 / L * (std::cos(L * tau) - 1.0);
  r.x3 = s.p3_mean * tau;
  r.p1 = 0.5 * p1 * (std::cos(L * tau) + 1.0);
  r.p2 = -0.5 * p1 * std::sin(L * tau);
  r.p3 = s.p3_mean;
  r.x3dot = s.p3_mean;
  r.R_sq = p1 * p1 / (L * L) + (L * L + l2 * l2) / (2.0 * L * L * l2);
  r.E_mean = 1.0 + s.lambda3 * s.lambda3 / 8.0 + s.p3_mean * s.p3_mean / 2.0 + L * L * r.R_sq / 2.0;
  return r;
}

FreeLimitCheck free_limit_check(const MagneticCoherentState& s, double tau, const SeriesSpec& series,
                                const QuadratureSpec& quad) {
  if (s.p1_mean != 0.0) throw InvalidArgument("free_limit_check: requires p1_mean = 0");
  FreeLimitCheck out;
  MagneticPacket packet(s, series, quad);
  const ParallelMotion pm = packet.parallel_motion(tau);
  const ConservedExpectations ce = packet.conserved_expectations();
  const TransversePosition tp = packet.transverse_position(tau);
  out.series.tau = tau;
  out.series.x_mean = pm.x3_mean;
  out.series.v_mean = pm.x3dot_mean;
  out.series.v_var = std::max(0.0, pm.x3dot_sq_mean - pm.x3dot_mean * pm.x3dot_mean);
  out.series.E_mean = ce.E_mean;
  out.x1_mean = tp.x1_mean;
  out.x2_mean = tp.x2_mean;

  const GaussianWeight w = parallel_weight(s);
  const double v = require_converged(
      gaussian_average(w, [](double k) { return k / std::sqrt(1.0 + k * k); }, quad), "free velocity");
  const double v2 = require_converged(
      gaussian_average(w, [](double k) { return k * k / (1.0 + k * k); }, quad), "free velocity^2");
  const double en = require_converged(
      gaussian_average(w, [](double k) { return std::sqrt(1.0 + k * k); }, quad), "free energy");
  out.quoted.tau = tau;
  out.quoted.x_mean = v * tau;
  out.quoted.v_mean = v;
  out.quoted.v_var = std::max(0.0, v2 - v * v);
  out.quoted.E_mean = en;
  return out;
}

}  // namespace kgcoh
