#include "app/tables.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "app/csv.hpp"
#include "app/parallel.hpp"
#include "kgcoh/freefield.hpp"

namespace kgcoh::app {

namespace {

constexpr double kFreeTol = 1e-4;
constexpr double kMagneticTol = 2e-3;
constexpr double kNonrelTol = 1e-5;

using Params = std::vector<std::pair<std::string, double>>;

TableCell make_cell(int table, int row, Params params, std::string quantity, double value,
                    std::optional<double> reference, double tolerance) {
  TableCell c{table, row, std::move(params), std::move(quantity), value, reference, {}, {}, tolerance};
  if (reference) {
    c.abs_dev = std::abs(value - *reference);
    c.rel_dev = *reference != 0.0 ? *c.abs_dev / std::abs(*reference) : *c.abs_dev;
  }
  return c;
}


struct MagneticRow {
  double Lambda, lambda_perp, lambda3, p1, p3;
  std::vector<std::pair<const char*, double>> refs;
};

Params magnetic_params(const MagneticRow& r) {
  return Params({{"Lambda", r.Lambda},
                      {"lambda_perp", r.lambda_perp},
                      {"lambda3", r.lambda3},
                      {"p1_mean", r.p1},
                      {"p3_mean", r.p3}});
}

double ratio_for(const MagneticRatios& m, const std::string& q) {
  if (q == "E/E_cl") return m.E;
  if (q == "x3dot/x3dot_cl") return m.x3dot;
  if (q == "R/R_cl") return m.R;
  if (q == "R_sq/R_cl_sq") return m.R_sq;
  if (q == "dR/R_cl") return m.dR;
  if (q == "E_nr/E_cl") return m.E_nr;
  throw std::logic_error("unknown quantity " + q);
}

std::vector<TableCell> magnetic_table(int number, const std::vector<MagneticRow>& rows,
                                      const TableOptions& opt) {
  auto ratios = parallel_map<MagneticRatios>(rows.size(), opt.threads, [&](std::size_t i) {
    const auto& r = rows[i];
    return magnetic_ratios(MagneticCoherentState::make(r.Lambda, r.lambda_perp, r.lambda3, r.p1, r.p3), opt);
  });
  std::vector<TableCell> cells;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [q, ref] : rows[i].refs) {
      double tol = std::string(q) == "E_nr/E_cl" ? kNonrelTol : kMagneticTol;
      cells.push_back(make_cell(number, static_cast<int>(i) + 1, magnetic_params(rows[i]), q,
                                ratio_for(ratios[i], q), ref, tol));
    }
  }
  return cells;
}

std::vector<std::pair<const char*, double>> five(double E, double v, double R, double R2, double dR) {
  return {{"E/E_cl", E}, {"x3dot/x3dot_cl", v}, {"R/R_cl", R}, {"R_sq/R_cl_sq", R2}, {"dR/R_cl", dR}};
}

}  // namespace

MagneticRatios magnetic_ratios(const MagneticCoherentState& s, const TableOptions& opt) {
  MagneticPacket packet(s, opt.series, opt.quad, opt.pairing);
  const auto c = packet.conserved_expectations();
  const auto par = packet.parallel_motion(0.0);
  const auto h = helix_derived(s.classical());
  const double R_cl = h.radius;
  const double v_cl = s.p3_mean / h.energy;
  return {c.E_mean / h.energy,
          par.x3dot_mean / v_cl,
          c.R_mean / R_cl,
          c.R_sq_mean / (R_cl * R_cl),
          std::sqrt(std::max(c.R_var, 0.0)) / R_cl,
          nonrel_expectations(s, 0.0).E_mean / h.energy,
          c.R_sq_closed / (R_cl * R_cl),
          c.R_sq_closed_second_moment / (R_cl * R_cl)};
}

std::vector<TableCell> table1(const TableOptions& opt) {
  struct Row {
    double p, lambda, E, E_nr;
  };
  const std::vector<Row> rows = {
      {0.1, 0.25, 1.00758, 1.00777},   {0.1, 0.5, 1.02944, 1.03109},   {0.1, 2.0, 1.35062, 1.49751},
      {0.001, 0.25, 1.00772, 1.00781}, {0.001, 0.5, 1.02997, 1.03125}, {0.001, 2.0, 1.35453, 1.50000},
  };
  std::vector<TableCell> cells;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto s = FreeCoherentState::make(r.lambda, 0.0, r.p);
    const double E_cl = std::sqrt(1.0 + r.p * r.p);
    const double E = energy_moments(s, opt.quad).E_mean / E_cl;
    const double E_nr = *nonrel_moments(s, 0.0).E_mean / E_cl;
    Params params{{"lambda", r.lambda}, {"p_mean", r.p}};
    int row = static_cast<int>(i) + 1;
    cells.push_back(make_cell(1, row, params, "E/E_cl", E, r.E, kFreeTol));
    cells.push_back(make_cell(1, row, params, "E_nr/E_cl", E_nr, r.E_nr, kFreeTol));
  }
  return cells;
}

std::vector<TableCell> table2(const TableOptions& opt) {
  const double L = 0.01;
  const double sL = std::sqrt(L);
  const std::vector<MagneticRow> rows = {
      {L, sL, 1e-3, 1.2, 1.6, five(1.00086, 0.99943, 1.00174, 1.00694, 0.05887)},
      {L, sL, 0.5, 1.2, 1.6, five(1.00394, 0.99022, 1.00174, 1.00694, 0.05887)},
      {L, 0.5, 1e-3, 1.2, 1.6, five(1.01067, 0.99286, 1.02199, 1.08694, 0.20611)},
      {L, 0.5, 0.5, 1.2, 1.6, five(1.01375, 0.98383, 1.02199, 1.08694, 0.20611)},
      {L, sL, 1e-3, 1.6, 1.2, five(1.00074, 0.99976, 1.00097, 1.00391, 0.04417)},
      {L, sL, 0.5, 1.6, 1.2, five(1.00521, 0.98663, 1.00097, 1.00391, 0.04417)},
      {L, 0.5, 1e-3, 1.6, 1.2, five(1.00932, 0.99691, 1.01230, 1.04891, 0.15539)},
      {L, 0.5, 0.5, 1.6, 1.2, five(1.01375, 0.98383, 1.01230, 1.04891, 0.15539)},
      {L, 0.25, 0.25, 3.0, 4.0, five(1.00063, 0.99936, 1.00089, 1.00356, 0.04218)},
      {L, 0.5, 0.5, 3.0, 4.0, five(1.00245, 0.99745, 1.00348, 1.01391, 0.08325)},
      {L, 0.5, 0.25, 3.0, 4.0, five(1.00211, 0.99849, 1.00348, 1.01391, 0.08325)},
      {L, 0.25, 0.5, 3.0, 4.0, five(1.00097, 0.99831, 1.00089, 1.00356, 0.04218)},
  };
  return magnetic_table(2, rows, opt);
}

std::vector<TableCell> table3(const TableOptions& opt) {
  const std::vector<MagneticRow> rows = {
      {0.1, 0.25, 0.25, 1.2, 1.6, five(1.01029, 0.99133, 1.01952, 1.07725, 0.19453)},
      {1e-4, 0.25, 0.25, 1.2, 1.6, five(1.00344, 0.99594, 1.00544, 1.02171, 0.10385)},
      {0.1, 0.5, 0.5, 1.2, 1.6, five(1.01547, 0.98264, 1.02553, 1.10069, 0.22128)},
      {1e-4, 0.5, 0.5, 1.2, 1.6, five(1.01372, 0.98385, 1.02195, 1.08681, 0.20595)},
  };
  return magnetic_table(3, rows, opt);
}

std::vector<TableCell> table4(const TableOptions& opt) {
  auto three = [](double E, double E_nr, double v) {
    return std::vector<std::pair<const char*, double>>{{"E/E_cl", E}, {"E_nr/E_cl", E_nr}, {"x3dot/x3dot_cl", v}};
  };
  const std::vector<MagneticRow> rows = {
      {0.1, 0.25, 0.25, 0.0006, 0.0008, three(1.06127, 1.06344, 0.93013)},
      {1e-4, 0.25, 0.25, 0.0006, 0.0008, three(1.02300, 1.02344, 0.96381)},
      {0.1, 0.5, 0.5, 0.0006, 0.0008, three(1.09724, 1.10375, 0.87193)},
      {1e-4, 0.5, 0.5, 0.0006, 0.0008, three(1.08764, 1.09375, 0.87959)},
  };
  return magnetic_table(4, rows, opt);
}

std::vector<TableCell> table(int which, const TableOptions& opt) {
  switch (which) {
    case 1: return table1(opt);
    case 2: return table2(opt);
    case 3: return table3(opt);
    case 4: return table4(opt);
    default: throw std::invalid_argument("table must be 1, 2, 3 or 4");
  }
}

std::string TableCell::params_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? ";" : "") << params[i].first << '=' << format_number(params[i].second);
  return os.str();
}

WideTable wide_table(const std::vector<TableCell>& cells) {
  WideTable t;
  if (cells.empty()) return t;
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  t.header = {"table", "row"};
  for (const auto& [k, v] : cells.front().params) t.header.push_back(k);
  std::vector<std::string> quantities;
  for (const auto& c : cells)
    if (c.row == cells.front().row) quantities.push_back(c.quantity);
  for (const auto& q : quantities)
    for (const char* suffix : {"", " reference", " abs_dev", " rel_dev"}) t.header.push_back(q + suffix);
  std::size_t i = 0;
  while (i < cells.size()) {
    const auto& first = cells[i];
    std::vector<std::string> r = {std::to_string(first.table), std::to_string(first.row)};
    for (const auto& [k, v] : first.params) r.push_back(format_number(v));
    for (std::size_t k = 0; k < quantities.size(); ++k, ++i) {
      if (i >= cells.size() || cells[i].row != first.row || cells[i].quantity != quantities[k])
        throw std::logic_error("table rows do not share one layout");
      const auto& c = cells[i];
      r.insert(r.end(), {format_number(c.value), opt(c.reference), opt(c.abs_dev), opt(c.rel_dev)});
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::vector<std::string> table_header() {
  return {"table", "row", "params", "quantity", "value", "reference", "abs_dev", "rel_dev", "tolerance", "within_tolerance"};
}

std::vector<std::string> table_fields(const TableCell& c) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  return {std::to_string(c.table), std::to_string(c.row), c.params_text(), c.quantity, format_number(c.value),
          opt(c.reference), opt(c.abs_dev), opt(c.rel_dev), format_number(c.tolerance),
          c.within_tolerance() ? "true" : "false"};
}

}  // namespace kgcoh::app
