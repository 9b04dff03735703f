#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace kgcoh::app {

// Reads a JSON object into CLI11 config items. Top-level keys name common
// options; nested objects name a subcommand section, e.g.
//   {"threads": 2, "magnetic": {"Lambda": 0.01, "table": 2}}
// Flags given on the command line take precedence over the file.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace kgcoh::app
