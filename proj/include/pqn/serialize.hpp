#pragma once

#include <string>

#include <json.hpp>

#include "pqn/structures.hpp"

namespace pqn {

inline constexpr const char* kToolVersion = "0.1.0";

std::string to_string(ZeroMode m);  // "symbolic" | "sampled"

// {degree, terms: [{indices: [1-based], coeff: prefix expression}]}
nlohmann::json form_to_json(const Form& a, const Chart& chart);
Form form_from_json(const nlohmann::json& j, const Chart& chart);

// {dim, rows: [[prefix expression]]}
nlohmann::json tensor_to_json(const Tensor11& t, const Chart& chart);
Tensor11 tensor_from_json(const nlohmann::json& j, const Chart& chart);

nlohmann::json point_to_json(const std::optional<Point>& p);
nlohmann::json entry_to_json(const CheckEntry& e);
nlohmann::json config_to_json(const ZeroTestConfig& cfg);

// {tool_version, config, entries, overall}; no timings, so equal inputs give equal bytes.
nlohmann::json report_to_json(const CheckReport& r);

// One line per entry, aligned; informational entries are marked "info".
std::string report_to_text(const CheckReport& r);

std::string form_to_text(const Form& a, const Chart& chart);
std::string tensor_to_text(const Tensor11& t, const Chart& chart);

}  // namespace pqn
