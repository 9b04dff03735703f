#include "app/config.hpp"

#include <json.hpp>

namespace kgcoh::app {

namespace {

using nlohmann::json;

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void collect(const json& obj, std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      parents.push_back(key);
      collect(value, parents, out);
      parents.pop_back();
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) {
        if (v.is_structured()) throw CLI::ConversionError(key + ": nested arrays are not supported");
        item.inputs.push_back(scalar_text(v));
      }
    } else if (!value.is_null()) {
      item.inputs.push_back(scalar_text(value));
    }
    out.push_back(std::move(item));
  }
}

void dump_options(const CLI::App* app, bool default_also, json& j) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string name = opt->get_lnames().front();
    if (opt->count() > 0) {
      auto results = opt->results();
      if (results.size() == 1)
        j[name] = results.front();
      else
        j[name] = results;
    } else if (default_also && !opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  json j = json::object();
  dump_options(app, default_also, j);
  for (const CLI::App* sub : app->get_subcommands({})) {
    json section = json::object();
    dump_options(sub, default_also, section);
    if (!section.empty()) j[sub->get_name()] = section;
  }
  return j.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json j;
  try {
    input >> j;
  } catch (const json::exception& e) {
    throw CLI::ConversionError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ConversionError("config: top level must be a JSON object");
  std::vector<CLI::ConfigItem> items;
  std::vector<std::string> parents;
  collect(j, parents, items);
  return items;
}

}  // namespace kgcoh::app
