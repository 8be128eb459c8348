#include "commands.hpp"

#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

namespace smdkit::cli {

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

}  // namespace

std::shared_ptr<std::string> attach_common(CLI::App& cmd) {
  cmd.set_help_flag("--help", "print this help and exit");
  auto path = std::make_shared<std::string>();
  cmd.add_option("--config", *path,
                 "JSON file whose keys are this command's long flags without "
                 "the leading dashes; flags given on the command line win")
      ->check(CLI::ExistingFile);
  return path;
}

/* Fills options of `cmd` from a flat JSON object. Only options without a
 * command-line result are touched, so explicit flags always win. Values go
 * through the option's own callback, which keeps validators (membership,
 * existing-file) active for config-supplied values too. */
void apply_json_config(CLI::App& cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ConfigError("invalid config: cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid config: " + path + " is not valid JSON (" +
                      std::string(e.what()) + ")");
  }
  if (!doc.is_object()) {
    throw ConfigError("invalid config: " + path +
                      " must hold one JSON object of flag values");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "config" || key == "help") {
      throw ConfigError("invalid config: \"" + key +
                        "\" cannot be set from a config file");
    }
    CLI::Option* op = cmd.get_option_no_throw("--" + key);
    if (op == nullptr) {
      throw ConfigError("invalid config: unknown key \"" + key + "\" in " +
                        path + " (no flag --" + key + " on this command)");
    }
    if (op->count() > 0) continue;
    if (value.is_object()) {
      throw ConfigError("invalid config: key \"" + key + "\" in " + path +
                        " must be a scalar or an array");
    }
    if (value.is_array()) {
      if (value.empty()) continue;
      for (const auto& item : value) {
        if (item.is_object() || item.is_array()) {
          throw ConfigError("invalid config: key \"" + key + "\" in " + path +
                            " must hold scalar elements");
        }
        op->add_result(scalar_text(item));
      }
    } else {
      op->add_result(scalar_text(value));
    }
    try {
      op->run_callback();
    } catch (const CLI::ValidationError& e) {
      throw ConfigError("invalid config: " + path + ": " +
                        std::string(e.what()));
    } catch (const CLI::ConversionError& e) {
      throw ConfigError("invalid config: " + path + ": " +
                        std::string(e.what()));
    }
  }
}

}  // namespace smdkit::cli
