#include "app/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>

#include <CLI11.hpp>

#include "app/config.hpp"
#include "app/csv.hpp"
#include "app/parallel.hpp"
#include "app/tables.hpp"
#include "app/validation.hpp"
#include "kgcoh/errors.hpp"
#include "kgcoh/freefield.hpp"
#include "kgcoh/magnetic.hpp"
#include "kgcoh/neutral.hpp"

namespace kgcoh::app {

std::vector<double> Grid::values(const std::string& name) const {
  if (!(step > 0.0) || !std::isfinite(step)) throw UsageError(name + " step must be positive");
  if (!std::isfinite(min) || !std::isfinite(max) || max < min) throw UsageError(name + " grid is empty");
  const auto n = static_cast<long long>(std::floor((max - min) / step * (1.0 + 1e-12) + 1e-9)) + 1;
  if (n > 10000000) throw UsageError(name + " grid has too many points");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = min + static_cast<double>(i) * step;
  return v;
}

namespace {

using Rows = std::vector<std::vector<double>>;

struct Common {
  std::string out_dir;
  unsigned threads = 0;
  double quad_tol = QuadratureSpec{}.rel_tol;
  double series_tol = SeriesSpec{}.tail_tol;
  int max_nodes = QuadratureSpec{}.max_nodes;

  QuadratureSpec quad() const {
    QuadratureSpec q;
    q.rel_tol = quad_tol;
    q.max_nodes = max_nodes;
    q.validate();
    return q;
  }
  SeriesSpec series() const {
    SeriesSpec s;
    s.tail_tol = series_tol;
    s.validate();
    return s;
  }
  TableOptions table_options(ThetaPairing pairing = ThetaPairing::printed) const {
    return {quad(), series(), pairing, threads};
  }
};

// Each dataset goes to <out>/<name>.csv, or to the output stream when no
// directory is given.
class Sink {
 public:
  Sink(std::string dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

  std::ostream& open(const std::string& name) {
    if (dir_.empty()) {
      if (count_++ > 0) out_ << '\n';
      return out_;
    }
    std::filesystem::create_directories(dir_);
    const auto path = std::filesystem::path(dir_) / (name + ".csv");
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!file_->good()) throw std::runtime_error("cannot write " + path.string());
    ++count_;
    return *file_;
  }

  void write(const std::string& name, const std::vector<std::string>& header, const Rows& rows) {
    CsvWriter w(open(name), header);
    for (const auto& r : rows) w.row(r);
    flush();
  }

  void flush() {
    if (file_) {
      file_->flush();
      if (!file_->good()) throw std::runtime_error("write failed in " + dir_);
    } else {
      out_.flush();
    }
  }

 private:
  std::string dir_;
  std::ostream& out_;
  std::unique_ptr<std::ofstream> file_;
  int count_ = 0;
};

void add_grid(CLI::App* app, const std::string& name, Grid& g, const std::string& unit) {
  app->add_option("--" + name + "-min", g.min, "first " + name + " grid point [" + unit + "]")->capture_default_str();
  app->add_option("--" + name + "-max", g.max, "last " + name + " grid point [" + unit + "]")->capture_default_str();
  app->add_option("--" + name + "-step", g.step, name + " grid spacing [" + unit + "]")->capture_default_str();
}

std::string moment_column(const std::string& label) {
  static const std::vector<std::pair<std::string, std::string>> units = {
      {"tau", "hbar/mc^2"},   {"x_mean", "hbar/mc"}, {"x_var", "(hbar/mc)^2"}, {"p_mean", "mc"},
      {"p_var", "(mc)^2"},    {"v_mean", "c"},       {"v_var", "c^2"},         {"E_mean", "mc^2"},
      {"E_var", "(mc^2)^2"},  {"uncertainty_product", "hbar"}};
  for (const auto& [k, u] : units)
    if (k == label) return k + "[" + u + "]";
  return label;
}

void write_moments(Sink& sink, const std::string& name, const std::vector<MomentSet>& sets) {
  std::vector<std::string> header;
  for (const auto& [k, v] : sets.front().labeled()) header.push_back(moment_column(k));
  Rows rows;
  for (const auto& m : sets) {
    std::vector<double> r;
    for (const auto& [k, v] : m.labeled()) r.push_back(v);
    rows.push_back(std::move(r));
  }
  sink.write(name, header, rows);
}

void write_cells(Sink& sink, const std::string& name, const std::vector<TableCell>& cells) {
  CsvWriter w(sink.open(name), table_header());
  for (const auto& c : cells) w.row(table_fields(c));
  sink.flush();
}

void write_table(Sink& sink, const std::string& name, const std::vector<TableCell>& cells) {
  const auto t = wide_table(cells);
  CsvWriter w(sink.open(name), t.header);
  for (const auto& r : t.rows) w.row(r);
  sink.flush();
}

// ---------------------------------------------------------------- free

struct FreeOpts {
  double lambda = 1.0;
  double alpha = 0.0;
  double p_mean = 1.0;
  int epsilon = 1;
  double kappa = 1.0;
  std::string observable;
  int table = 0;
  std::string sweep;
  bool density = false;
  Grid tau{0.0, 0.0, 1.0};
  Grid x{-10.0, 10.0, 0.1};
  Grid p{0.0, 5.0, 0.1};
};

void setup_free(CLI::App* cmd, FreeOpts& o) {
  cmd->add_option("--lambda", o.lambda, "inverse packet width [mc/hbar]")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "initial mean position [hbar/mc]")->capture_default_str();
  cmd->add_option("--p-mean", o.p_mean, "mean momentum [mc]")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "charge parity")->check(CLI::IsMember({-1, 1}))->capture_default_str();
  cmd->add_option("--kappa", o.kappa, "normalization product kappa(1 + epsilon a)")->capture_default_str();
  cmd->add_option("--observable", o.observable, "vdot, energy, moments (on the tau grid) or nonrel")
      ->check(CLI::IsMember({"vdot", "energy", "moments", "nonrel"}));
  cmd->add_option("--table", o.table, "reproduce table 1")->check(CLI::IsMember({1}));
  cmd->add_option("--sweep", o.sweep, "p: moments against mean momentum; tau: spreading against time")
      ->check(CLI::IsMember({"p", "tau"}));
  cmd->add_flag("--density", o.density, "rho and |psi|^2 on the tau x x grid");
  add_grid(cmd, "tau", o.tau, "hbar/mc^2");
  add_grid(cmd, "x", o.x, "hbar/mc");
  add_grid(cmd, "p", o.p, "mc");
}

int run_free(const FreeOpts& o, const Common& c, Sink& sink) {
  const int modes = (!o.observable.empty()) + (o.table != 0) + (!o.sweep.empty()) + o.density;
  if (modes > 1) throw UsageError("free: choose one of --observable, --table, --sweep, --density");
  const auto q = c.quad();

  if (o.table == 1) {
    write_table(sink, "table1", table1(c.table_options()));
    return kOk;
  }

  const auto s = FreeCoherentState::make(o.lambda, o.alpha, o.p_mean, o.epsilon);
  const NormalizationConvention norm{o.kappa};

  if (o.sweep == "p") {
    const auto ps = o.p.values("p");
    auto rows = parallel_map<std::vector<double>>(ps.size(), c.threads, [&](std::size_t i) {
      auto st = FreeCoherentState::make(o.lambda, o.alpha, ps[i], o.epsilon);
      const auto v = velocity_moments(st, q);
      const auto e = energy_moments(st, q);
      const auto cl = free_classical(ps[i]);
      return std::vector<double>{o.lambda, ps[i], v.v_mean, std::sqrt(v.v_var), cl.velocity, e.E_mean,
                                 std::sqrt(e.E_var), cl.energy, *nonrel_moments(st, 0.0).E_mean};
    });
    sink.write("sweep_p",
               {"lambda[mc/hbar]", "p_mean[mc]", "v_mean[c]", "dv[c]", "v_cl[c]", "E_mean[mc^2]", "dE[mc^2]",
                "E_cl[mc^2]", "E_nr[mc^2]"},
               rows);
    return kOk;
  }

  if (o.sweep == "tau") {
    const auto taus = o.tau.values("tau");
    auto rows = parallel_map<std::vector<double>>(taus.size(), c.threads, [&](std::size_t i) {
      const auto m = evolved_moments(s, taus[i], q);
      const auto n = nonrel_moments(s, taus[i]);
      return std::vector<double>{taus[i], std::sqrt(*m.x_var), std::sqrt(*n.x_var), *m.uncertainty_product,
                                 *n.uncertainty_product};
    });
    sink.write("sweep_tau", {"tau[hbar/mc^2]", "dx[hbar/mc]", "dx_nr[hbar/mc]", "dxdp[hbar]", "dxdp_nr[hbar]"},
               rows);
    return kOk;
  }

  if (o.density) {
    const auto taus = o.tau.values("tau");
    const auto xs = o.x.values("x");
    auto rows = parallel_map<std::vector<double>>(taus.size() * xs.size(), c.threads, [&](std::size_t i) {
      const double tau = taus[i / xs.size()], x = xs[i % xs.size()];
      return std::vector<double>{tau, x, probability_density(s, tau, x, q), kg_density(s, tau, x, norm, q)};
    });
    sink.write("density", {"tau[hbar/mc^2]", "x[hbar/mc]", "rho[mc/hbar]", "psi_sq[mc/hbar]"}, rows);
    return kOk;
  }

  const std::string obs = o.observable.empty() ? "moments" : o.observable;
  if (obs == "vdot") {
    const auto v = velocity_moments(s, q);
    sink.write("vdot", {"lambda[mc/hbar]", "p_mean[mc]", "epsilon", "v_mean[c]", "v_sq_mean[c^2]", "v_var[c^2]", "v_cl[c]"},
               {{o.lambda, o.p_mean, double(o.epsilon), v.v_mean, v.v_sq_mean, v.v_var,
                 o.epsilon * free_classical(o.p_mean).velocity}});
  } else if (obs == "energy") {
    const auto e = energy_moments(s, q);
    const double E_cl = free_classical(o.p_mean).energy;
    const double E_nr = *nonrel_moments(s, 0.0).E_mean;
    sink.write("energy",
               {"lambda[mc/hbar]", "p_mean[mc]", "E_mean[mc^2]", "E_sq_mean[(mc^2)^2]", "E_var[(mc^2)^2]", "E_cl[mc^2]",
                "E_nr[mc^2]", "E_mean/E_cl", "E_nr/E_cl"},
               {{o.lambda, o.p_mean, e.E_mean, e.E_sq_mean, e.E_var, E_cl, E_nr, e.E_mean / E_cl, E_nr / E_cl}});
  } else {
    const auto taus = o.tau.values("tau");
    auto sets = parallel_map<MomentSet>(taus.size(), c.threads, [&](std::size_t i) {
      return obs == "nonrel" ? nonrel_moments(s, taus[i]) : evolved_moments(s, taus[i], q);
    });
    write_moments(sink, obs, sets);
  }
  return kOk;
}

// ---------------------------------------------------------------- magnetic

struct MagneticOpts {
  double Lambda = 0.01;
  double lambda_perp = 0.1;
  double lambda3 = 1e-3;
  double p1 = 1.2;
  double p3 = 1.6;
  double kappa = 1.0;
  std::string pairing = "printed";
  int table = 0;
  std::string fig;
  bool trajectory = false;
  bool conserved = false;
  bool uncertainty = false;
  bool field = false;
  std::string check;
  double periods = 2.0;
  int samples = 200;
  double tau = 0.0;
  Grid x{-10.0, 10.0, 0.5};
};

void setup_magnetic(CLI::App* cmd, MagneticOpts& o) {
  cmd->add_option("--Lambda", o.Lambda, "field strength e hbar B/(mc)^2")->capture_default_str();
  cmd->add_option("--lambda-perp", o.lambda_perp, "transverse inverse width [mc/hbar]")->capture_default_str();
  cmd->add_option("--lambda3", o.lambda3, "parallel inverse width [mc/hbar]")->capture_default_str();
  cmd->add_option("--p1", o.p1, "mean transverse momentum [mc]")->capture_default_str();
  cmd->add_option("--p3", o.p3, "mean parallel momentum [mc]")->capture_default_str();
  cmd->add_option("--kappa", o.kappa, "normalization product kappa(1 + a)")->capture_default_str();
  cmd->add_option("--theta-pairing", o.pairing, "level used by the (n+1, l)-(n, l+1) pairs")
      ->check(CLI::IsMember({"printed", "symmetric"}))
      ->capture_default_str();
  cmd->add_option("--table", o.table, "reproduce table 2, 3 or 4")->check(CLI::IsMember({2, 3, 4}));
  cmd->add_option("--fig", o.fig, "helix: the two trajectories at Lambda = 0.001")->check(CLI::IsMember({"helix"}));
  cmd->add_flag("--trajectory", o.trajectory, "position and momentum expectations against time");
  cmd->add_flag("--conserved", o.conserved, "energy, angular momentum and radius expectations");
  cmd->add_flag("--uncertainty", o.uncertainty, "dx3 dp3 against time");
  cmd->add_flag("--field", o.field, "|psi|^2 along the three coordinate axes");
  cmd->add_option("--check", o.check, "gyration-center: drift of the gyration center over five periods")
      ->check(CLI::IsMember({"gyration-center"}));
  cmd->add_option("--periods", o.periods, "time span in classical periods")->capture_default_str();
  cmd->add_option("--samples", o.samples, "time samples")->capture_default_str();
  cmd->add_option("--tau", o.tau, "time of the field slice [hbar/mc^2]")->capture_default_str();
  add_grid(cmd, "x", o.x, "hbar/mc");
}

ThetaPairing pairing_of(const std::string& s) { return s == "symmetric" ? ThetaPairing::symmetric : ThetaPairing::printed; }

const std::vector<std::string> kTrajectoryHeader = {
    "tau/tau_cl", "x1/R_cl", "x2/R_cl", "x3[hbar/mc]", "x3/(x3dot_cl*tau_cl)", "p1/Pi_perp", "p2/Pi_perp",
    "Pi1/Pi_perp", "Pi2/Pi_perp", "x1_cl/R_cl", "x2_cl/R_cl"};

Rows trajectory_rows(const MagneticPacket& m, double periods, int samples, unsigned threads) {
  if (samples < 2) throw UsageError("--samples must be at least 2");
  if (!(periods > 0.0)) throw UsageError("--periods must be positive");
  const auto& st = m.state();
  const auto h = helix_derived(st.classical());
  const double Pi_perp = st.p1_mean;
  const double x3_scale = st.p3_mean / h.energy * h.period;
  const auto center = default_gyration_center(st.classical());
  return parallel_map<std::vector<double>>(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    const double f = periods * static_cast<double>(i) / (samples - 1);
    const double tau = f * h.period;
    const auto x = m.transverse_position(tau);
    const auto par = m.parallel_motion(tau);
    const auto mom = m.momentum_expectations(tau);
    const auto cl = helix_position(st.classical(), tau, center);
    return std::vector<double>{f,
                               x.x1_mean / h.radius,
                               x.x2_mean / h.radius,
                               par.x3_mean,
                               x3_scale != 0.0 ? par.x3_mean / x3_scale : NAN,
                               mom.p1 / Pi_perp,
                               mom.p2 / Pi_perp,
                               mom.Pi1 / Pi_perp,
                               mom.Pi2 / Pi_perp,
                               cl[0] / h.radius,
                               cl[1] / h.radius};
  });
}

int run_magnetic(const MagneticOpts& o, const Common& c, Sink& sink) {
  const int modes = (o.table != 0) + (!o.fig.empty()) + o.trajectory + o.conserved + o.uncertainty + o.field +
                    (!o.check.empty());
  if (modes > 1)
    throw UsageError("magnetic: choose one of --table, --fig, --trajectory, --conserved, --uncertainty, --field, --check");
  const auto pairing = pairing_of(o.pairing);
  const auto q = c.quad();
  const auto series = c.series();

  if (o.table != 0) {
    write_table(sink, "table" + std::to_string(o.table), table(o.table, c.table_options(pairing)));
    return kOk;
  }

  if (o.fig == "helix") {
    const double L = 0.001;
    const std::vector<std::pair<double, double>> cases = {{std::sqrt(L), 1e-3}, {0.25, 0.25}};
    std::vector<std::string> header = {"case", "lambda_perp[mc/hbar]", "lambda3[mc/hbar]"};
    header.insert(header.end(), kTrajectoryHeader.begin(), kTrajectoryHeader.end());
    Rows rows;
    for (std::size_t k = 0; k < cases.size(); ++k) {
      MagneticPacket m(MagneticCoherentState::make(L, cases[k].first, cases[k].second, 1.2, 1.6), series, q, pairing);
      for (auto& r : trajectory_rows(m, o.periods, o.samples, c.threads)) {
        r.insert(r.begin(), {double(k + 1), cases[k].first, cases[k].second});
        rows.push_back(std::move(r));
      }
    }
    sink.write("fig_helix", header, rows);
    return kOk;
  }

  const auto state = MagneticCoherentState::make(o.Lambda, o.lambda_perp, o.lambda3, o.p1, o.p3);
  MagneticPacket m(state, series, q, pairing);
  const auto h = helix_derived(state.classical());

  if (o.trajectory) {
    sink.write("trajectory", kTrajectoryHeader, trajectory_rows(m, o.periods, o.samples, c.threads));
    return kOk;
  }

  if (o.uncertainty) {
    if (o.samples < 2) throw UsageError("--samples must be at least 2");
    const double dp3 = state.lambda3 / 2.0;
    auto rows = parallel_map<std::vector<double>>(static_cast<std::size_t>(o.samples), c.threads, [&](std::size_t i) {
      const double f = o.periods * static_cast<double>(i) / (o.samples - 1);
      const double product = m.x3_uncertainty(f * h.period);
      return std::vector<double>{f, f * h.period, product / dp3, dp3, product};
    });
    sink.write("uncertainty", {"tau/tau_cl", "tau[hbar/mc^2]", "dx3[hbar/mc]", "dp3[mc]", "dx3dp3[hbar]"}, rows);
    return kOk;
  }

  if (o.field) {
    const auto xs = o.x.values("x");
    const NormalizationConvention norm{o.kappa};
    const FieldSlice slice(m, o.tau, 0.0, norm);
    auto transverse = parallel_map<std::vector<double>>(2 * xs.size(), c.threads, [&](std::size_t i) {
      const double x = xs[i % xs.size()];
      const bool along_x2 = i >= xs.size();
      double phi = along_x2 ? (x < 0 ? -std::numbers::pi / 2 : std::numbers::pi / 2) : (x < 0 ? std::numbers::pi : 0.0);
      return std::vector<double>{along_x2 ? 2.0 : 1.0, x, slice.density(std::abs(x), phi)};
    });
    auto parallel = parallel_map<std::vector<double>>(xs.size(), c.threads, [&](std::size_t i) {
      return std::vector<double>{3.0, xs[i], std::norm(m.kg_field(o.tau, 0.0, 0.0, xs[i], norm))};
    });
    transverse.insert(transverse.end(), parallel.begin(), parallel.end());
    sink.write("field", {"axis", "x[hbar/mc]", "psi_sq[(mc/hbar)^3]"}, transverse);
    return kOk;
  }

  if (o.check == "gyration-center") {
    const int n = 50;
    const auto g0 = m.momentum_expectations(0.0);
    auto drift = parallel_map<double>(n, c.threads, [&](std::size_t i) {
      const auto g = m.momentum_expectations(5.0 * h.period * static_cast<double>(i + 1) / n);
      return std::max(std::abs(g.x1_gc - g0.x1_gc), std::abs(g.x2_gc - g0.x2_gc));
    });
    double worst = 0.0;
    for (double d : drift) worst = std::max(worst, d);
    const double tol = 1e-10;
    const bool ok = worst / h.radius <= tol;
    CsvWriter w(sink.open("gyration_center"), {"quantity", "value", "tolerance", "passed"});
    w.row(std::vector<std::string>{"x1_gc(0)/R_cl", format_number(g0.x1_gc / h.radius), "", ""});
    w.row(std::vector<std::string>{"x2_gc(0)/R_cl", format_number(g0.x2_gc / h.radius), "", ""});
    w.row(std::vector<std::string>{"max_drift_over_5_periods/R_cl", format_number(worst / h.radius),
                                   format_number(tol), ok ? "true" : "false"});
    sink.flush();
    return ok ? kOk : kNumerical;
  }

  const auto ce = m.conserved_expectations();
  const auto par = m.parallel_motion(0.0);
  const auto rep = m.report();
  sink.write("conserved",
             {"Lambda", "lambda_perp[mc/hbar]", "lambda3[mc/hbar]", "p1_mean[mc]", "p3_mean[mc]", "E_mean[mc^2]",
              "E_cl[mc^2]", "x3dot_mean[c]", "x3dot_cl[c]", "L3_mean[hbar]", "R_mean[hbar/mc]", "R_cl[hbar/mc]",
              "R_sq_mean[(hbar/mc)^2]", "R_var[(hbar/mc)^2]", "R_gc_sq_mean[(hbar/mc)^2]", "R_sq_closed[(hbar/mc)^2]",
              "R_sq_closed_second_moment[(hbar/mc)^2]", "total_probability", "terms", "max_level"},
             {{o.Lambda, o.lambda_perp, o.lambda3, o.p1, o.p3, ce.E_mean, h.energy, par.x3dot_mean, o.p3 / h.energy,
               ce.L3_mean, ce.R_mean, h.radius, ce.R_sq_mean, ce.R_var, ce.R_gc_sq_mean, ce.R_sq_closed,
               ce.R_sq_closed_second_moment, ce.total_probability, double(rep.terms), double(rep.max_level)}});
  return kOk;
}

// ---------------------------------------------------------------- neutral

struct NeutralOpts {
  double lambda = 1.0;
  double alpha = 0.0;
  double p_mean = 1.0;
  bool reality_check = false;
  bool field = false;
  Grid tau{0.0, 20.0, 5.0};
  Grid x{-10.0, 10.0, 0.5};
};

void setup_neutral(CLI::App* cmd, NeutralOpts& o) {
  cmd->add_option("--lambda", o.lambda, "inverse packet width [mc/hbar]")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "initial mean position [hbar/mc]")->capture_default_str();
  cmd->add_option("--p-mean", o.p_mean, "mean momentum of the particle component [mc]")->capture_default_str();
  cmd->add_flag("--reality-check", o.reality_check, "largest |Im psi| on the tau x x grid");
  cmd->add_flag("--field", o.field, "field values on the tau x x grid (default)");
  add_grid(cmd, "tau", o.tau, "hbar/mc^2");
  add_grid(cmd, "x", o.x, "hbar/mc");
}

int run_neutral(const NeutralOpts& o, const Common& c, Sink& sink) {
  if (o.reality_check && o.field) throw UsageError("neutral: choose one of --reality-check, --field");
  const auto q = c.quad();
  const auto s = NeutralCoherentState::make(o.lambda, o.alpha, o.p_mean);
  const auto taus = o.tau.values("tau");
  const auto xs = o.x.values("x");
  auto values = parallel_map<std::complex<double>>(taus.size() * xs.size(), c.threads, [&](std::size_t i) {
    return neutral_field(s, taus[i / xs.size()], xs[i % xs.size()], q);
  });
  if (o.reality_check) {
    double worst = 0.0, scale = 0.0;
    for (const auto& v : values) {
      worst = std::max(worst, std::abs(v.imag()));
      scale = std::max(scale, std::abs(v.real()));
    }
    const double tol = 1e-10;
    const bool ok = worst <= tol;
    CsvWriter w(sink.open("reality_check"), {"quantity", "value", "tolerance", "passed"});
    w.row(std::vector<std::string>{"max_abs_imag[(mc/hbar)^(1/2)]", format_number(worst), format_number(tol),
                                   ok ? "true" : "false"});
    w.row(std::vector<std::string>{"max_abs_real[(mc/hbar)^(1/2)]", format_number(scale), "", ""});
    w.row(std::vector<std::string>{"grid_points", std::to_string(values.size()), "", ""});
    sink.flush();
    return ok ? kOk : kNumerical;
  }
  Rows rows;
  for (std::size_t i = 0; i < values.size(); ++i)
    rows.push_back({taus[i / xs.size()], xs[i % xs.size()], values[i].real(), values[i].imag()});
  sink.write("neutral_field", {"tau[hbar/mc^2]", "x[hbar/mc]", "psi_re[(mc/hbar)^(1/2)]", "psi_im[(mc/hbar)^(1/2)]"},
             rows);
  return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateOpts {
  bool all = false;
  bool tables = false;
  bool invariants = false;
  bool properties = false;
  bool json = false;
};

void setup_validate(CLI::App* cmd, ValidateOpts& o) {
  cmd->add_flag("--all", o.all, "every suite (default)");
  cmd->add_flag("--tables", o.tables, "per-cell deviations against the four reference tables");
  cmd->add_flag("--invariants", o.invariants, "conservation laws, symmetries and limits");
  cmd->add_flag("--properties", o.properties, "quadrature, special functions and curve shapes");
  cmd->add_flag("--json", o.json, "print the JSON report instead of text");
}

int run_validate(const ValidateOpts& o, const Common& c, Sink& sink, std::ostream& out) {
  ValidationOptions v;
  v.tables = c.table_options();
  const bool none = !o.tables && !o.invariants && !o.properties;
  v.run_tables = o.all || none || o.tables;
  v.run_invariants = o.all || none || o.invariants;
  v.run_properties = o.all || none || o.properties;
  const auto report = validate(v);
  if (o.json)
    report.write_json(out);
  else
    report.write_text(out);
  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    std::ofstream txt(std::filesystem::path(c.out_dir) / "validation.txt", std::ios::binary);
    report.write_text(txt);
    std::ofstream js(std::filesystem::path(c.out_dir) / "validation.json", std::ios::binary);
    report.write_json(js);
    if (!txt.good() || !js.good()) throw std::runtime_error("cannot write the validation report");
    if (!report.cells.empty()) write_cells(sink, "table_cells", report.cells);
  }
  return report.passed() ? kOk : kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherent states of the Klein-Gordon field: free, neutral and magnetic packets.\n" +
                   std::string(kUnitsNote),
               "kgcoh"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  Common common;
  app.add_option("--out", common.out_dir, "directory for CSV files (default: standard output)");
  app.add_option("--threads", common.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--quad-tol", common.quad_tol, "relative tolerance of the momentum quadratures")->capture_default_str();
  app.add_option("--series-tol", common.series_tol, "tail tolerance of the Landau series")->capture_default_str();
  app.add_option("--max-nodes", common.max_nodes, "node cap of the adaptive quadrature")->capture_default_str();

  FreeOpts free_opts;
  MagneticOpts mag_opts;
  NeutralOpts neutral_opts;
  ValidateOpts validate_opts;
  auto* free_cmd = app.add_subcommand("free", "charged packet without field");
  auto* mag_cmd = app.add_subcommand("magnetic", "packet in a uniform magnetic field");
  auto* neutral_cmd = app.add_subcommand("neutral", "real field built from a particle/antiparticle pair");
  auto* validate_cmd = app.add_subcommand("validate", "run the validation suites");
  for (auto* cmd : {free_cmd, mag_cmd, neutral_cmd, validate_cmd}) cmd->fallthrough();
  setup_free(free_cmd, free_opts);
  setup_magnetic(mag_cmd, mag_opts);
  setup_neutral(neutral_cmd, neutral_opts);
  setup_validate(validate_cmd, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Sink sink(common.out_dir, out);
    if (*free_cmd) return run_free(free_opts, common, sink);
    if (*mag_cmd) return run_magnetic(mag_opts, common, sink);
    if (*neutral_cmd) return run_neutral(neutral_opts, common, sink);
    return run_validate(validate_opts, common, sink, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << " (best estimate " << format_number(e.best_estimate())
        << ", error estimate " << format_number(e.error_estimate()) << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace kgcoh::app
