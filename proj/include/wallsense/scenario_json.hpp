#pragma once

#include <string>

#include <json.hpp>

#include "wallsense/scenario.hpp"

namespace wallsense {

/// JSON document for `scenario` with keys in schema order.
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

/// Strict decode. `path_prefix` is prepended to field paths in diagnostics,
/// so embedded scenarios report e.g. "scenario.placement.tx_m".
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& path_prefix = "");

}  // namespace wallsense
