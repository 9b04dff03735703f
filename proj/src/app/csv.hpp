#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kgcoh::app {

// Units line shared by every data file.
inline constexpr const char* kUnitsNote =
    "dimensionless units: momentum [mc], length [hbar/mc], time [hbar/mc^2], energy [mc^2]";

// 12 significant digits, '.' decimal separator, independent of locale.
std::string format_number(double v);

// RFC-4180 style writer. The first record names the columns; column names
// carry the unit convention where it is not implied.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);

  std::size_t columns() const { return columns_; }

 private:
  void write_fields(const std::vector<std::string>& fields);

  std::ostream& out_;
  std::size_t columns_;
};

std::string quote_field(const std::string& field);

}  // namespace kgcoh::app
