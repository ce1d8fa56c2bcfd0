#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqn/models.hpp"

namespace pqn::cli {

enum ExitCode : int { kMatch = 0, kMismatch = 1, kConfigError = 2 };

inline constexpr int kMaxKmax = 8;

struct PotentialSpec {
  int i = 1;
  int j = 2;
  std::string v;  // prefix expression in x
};

struct RunConfig {
  std::string command;  // check | involutivity | deform
  std::string model;
  int n = 3;
  std::vector<Rational> f;
  std::vector<PotentialSpec> potentials;
  std::optional<int> kmax;  // defaults to n
  ZeroTestConfig zero;
  bool tolerance_set = false;
  std::string format = "text";
  std::string out;
  std::optional<std::string> expect;
  // deform only
  std::string base = "canonical";
  std::string omega = "closed-toda";
  std::optional<nlohmann::json> omega_form;
};

/// Applies a JSON config object; unknown keys raise ParseError.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

Rational parse_rational(const std::string& text);
PotentialSpec parse_potential(const std::string& text);  // "i,j:expr"

nlohmann::json config_echo(const RunConfig& cfg);

// Each command writes its report to `out` and returns the exit code.
int cmd_check(const RunConfig& cfg, std::ostream& out);
int cmd_involutivity(const RunConfig& cfg, std::ostream& out);
int cmd_deform(const RunConfig& cfg, std::ostream& out);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pqn::cli
