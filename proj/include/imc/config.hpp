#pragma once

#include <string>
#include <utility>
#include <vector>

#include "imc/scenario.hpp"

namespace imc {

/// Flat dotted-key configuration. Values are scalars, bare tokens, or
/// row-major number lists in brackets: `slave.plant.G = [1.0, 9.98e-5, -2.10, 1.0]`.
struct ConfigMap {
    std::vector<std::pair<std::string, std::string>> entries;  ///< in file order

    void set(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
};

/// Parses config text; '#' starts a comment. Throws ParseError on bad syntax.
ConfigMap parse_config_text(const std::string& text);

/// Parses a `key=value` command-line override.
std::pair<std::string, std::string> parse_set_expr(const std::string& expr);

/// Builds a scenario from a config map. The `scenario` key selects a builtin
/// ("custom" starts from defaults); every other key overrides one field.
/// Unknown keys raise ConfigError naming the key.
Scenario scenario_from_config(const ConfigMap& cfg);

/// Applies overrides onto an existing scenario (same key set, minus `scenario`).
void apply_overrides(Scenario& sc, const ConfigMap& cfg);

} // namespace imc
