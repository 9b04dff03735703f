#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgcoh/magnetic.hpp"
#include "kgcoh/quadrature.hpp"

namespace kgcoh::app {

// One computed table entry. The deviations are only filled when a published
// reference value exists.
struct TableCell {
  int table = 0;
  int row = 0;
  std::vector<std::pair<std::string, double>> params;
  std::string quantity;
  double value = 0.0;
  std::optional<double> reference;
  std::optional<double> abs_dev;
  std::optional<double> rel_dev;
  double tolerance = 0.0;  // acceptance band for abs_dev

  bool within_tolerance() const { return !abs_dev || *abs_dev <= tolerance; }
  std::string params_text() const;  // "k=v;k=v"
};

struct TableOptions {
  QuadratureSpec quad{};
  SeriesSpec series{};
  ThetaPairing pairing = ThetaPairing::printed;
  unsigned threads = 0;
};

// Ratios of the packet expectation values to the classical helix values.
struct MagneticRatios {
  double E;
  double x3dot;
  double R;
  double R_sq;
  double dR;
  double E_nr;
  double R_sq_closed;
  double R_sq_closed_second_moment;
};

MagneticRatios magnetic_ratios(const MagneticCoherentState& s, const TableOptions& opt = {});

std::vector<TableCell> table1(const TableOptions& opt = {});
std::vector<TableCell> table2(const TableOptions& opt = {});
std::vector<TableCell> table3(const TableOptions& opt = {});
std::vector<TableCell> table4(const TableOptions& opt = {});
std::vector<TableCell> table(int which, const TableOptions& opt = {});

// Long layout, one record per cell.
std::vector<std::string> table_header();
std::vector<std::string> table_fields(const TableCell& c);

// Layout of the printed tables: one record per row with the parameters,
// then value, reference, abs_dev and rel_dev for every quantity.
struct WideTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
WideTable wide_table(const std::vector<TableCell>& cells);

}  // namespace kgcoh::app
