#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "app/tables.hpp"

namespace kgcoh::app {

struct Check {
  std::string suite;
  std::string name;
  double measured = 0.0;  // deviation or error measure
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  TableOptions tables{};
  bool run_tables = false;
  bool run_invariants = false;
  bool run_properties = false;
};

struct ValidationReport {
  std::vector<Check> checks;
  std::vector<TableCell> cells;  // per-cell deviations of the table suite

  bool passed() const;
  void write_text(std::ostream& os) const;
  void write_json(std::ostream& os) const;
};

std::vector<Check> table_checks(const std::vector<TableCell>& cells);
std::vector<Check> invariant_checks(const TableOptions& opt);
std::vector<Check> property_checks(const TableOptions& opt);

ValidationReport validate(const ValidationOptions& opt);

}  // namespace kgcoh::app
