#include "pqn/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace pqn {

using nlohmann::json;

std::string to_string(ZeroMode m) { return m == ZeroMode::Symbolic ? "symbolic" : "sampled"; }

json form_to_json(const Form& a, const Chart& chart) {
  json terms = json::array();
  for (const auto& [idx, c] : a.terms()) {
    json ix = json::array();
    for (int i : idx) ix.push_back(i + 1);
    terms.push_back({{"indices", ix}, {"coeff", c.to_string(chart.namer())}});
  }
  return {{"degree", a.degree()}, {"terms", terms}};
}

Form form_from_json(const json& j, const Chart& chart) {
  if (!j.is_object() || !j.contains("degree") || !j.contains("terms"))
    throw ParseError("form needs 'degree' and 'terms'");
  const int degree = j.at("degree").get<int>();
  if (degree < 0 || degree > chart.dim()) throw ParseError("form degree out of range");
  Form out(chart.dim(), degree);
  for (const auto& t : j.at("terms")) {
    Form::Index idx;
    for (const auto& i : t.at("indices")) {
      const int k = i.get<int>();
      if (k < 1 || k > chart.dim()) throw ParseError("form index out of range: " + std::to_string(k));
      idx.push_back(k - 1);
    }
    if (static_cast<int>(idx.size()) != degree) throw ParseError("term length does not match form degree");
    out += Form::monomial(chart.dim(), idx, parse_scalar(t.at("coeff").get<std::string>(), chart));
  }
  return out;
}

json tensor_to_json(const Tensor11& t, const Chart& chart) {
  json rows = json::array();
  for (int i = 0; i < t.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < t.dim(); ++j) row.push_back(t(i, j).to_string(chart.namer()));
    rows.push_back(row);
  }
  return {{"dim", t.dim()}, {"rows", rows}};
}

Tensor11 tensor_from_json(const json& j, const Chart& chart) {
  const auto& rows = j.at("rows");
  if (static_cast<int>(rows.size()) != chart.dim()) throw ParseError("tensor row count does not match chart");
  std::vector<std::vector<ScalarField>> m;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != chart.dim()) throw ParseError("tensor row length does not match chart");
    auto& row = m.emplace_back();
    for (const auto& e : r) row.push_back(parse_scalar(e.get<std::string>(), chart));
  }
  return Tensor11::from_rows(m);
}

json point_to_json(const std::optional<Point>& p) {
  if (!p) return nullptr;
  return json(*p);
}

json entry_to_json(const CheckEntry& e) {
  json j = {{"axiom", e.axiom},
            {"verdict", e.pass ? "pass" : "fail"},
            {"residual", e.residual},
            {"witness", point_to_json(e.witness)},
            {"mode", to_string(e.mode)},
            {"samples", e.samples}};
  if (e.informational) j["informational"] = true;
  return j;
}

json config_to_json(const ZeroTestConfig& cfg) {
  return {{"sample_count", cfg.sample_count},
          {"half_width", cfg.half_width},
          {"separation", cfg.separation},
          {"tolerance", cfg.tolerance},
          {"seed", cfg.seed}};
}

json report_to_json(const CheckReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(entry_to_json(e));
  return {{"tool_version", kToolVersion},
          {"config", config_to_json(r.config)},
          {"entries", entries},
          {"overall", r.overall() ? "pass" : "fail"}};
}

std::string report_to_text(const CheckReport& r) {
  std::size_t width = 0;
  for (const auto& e : r.entries) width = std::max(width, e.axiom.size());
  std::ostringstream os;
  for (const auto& e : r.entries) {
    const char* tag = e.informational ? "info" : (e.pass ? "PASS" : "FAIL");
    char res[32];
    std::snprintf(res, sizeof res, "%.3g", e.residual);
    os << "  " << tag << "  " << e.axiom << std::string(width - e.axiom.size() + 2, ' ') << to_string(e.mode)
       << (e.mode == ZeroMode::Symbolic ? " " : "  ") << "residual=" << res;
    if (e.samples > 0) os << "  samples=" << e.samples;
    if (!e.pass && e.witness) {
      os << "  witness=(";
      for (std::size_t i = 0; i < e.witness->size(); ++i) os << (i ? ", " : "") << (*e.witness)[i];
      os << ")";
    }
    os << "\n";
  }
  os << "overall: " << (r.overall() ? "pass" : "fail") << "\n";
  return os.str();
}

std::string form_to_text(const Form& a, const Chart& chart) {
  if (a.is_zero()) return "  0\n";
  std::ostringstream os;
  for (const auto& [idx, c] : a.terms()) {
    os << "  ";
    if (idx.empty()) os << "1";
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "^" : "") << "d" << chart.name(idx[k]);
    os << "  " << c.to_string(chart.namer()) << "\n";
  }
  return os.str();
}

std::string tensor_to_text(const Tensor11& t, const Chart& chart) {
  std::ostringstream os;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j)
      if (!t(i, j).is_zero())
        os << "  [" << chart.name(i) << ", " << chart.name(j) << "]  " << t(i, j).to_string(chart.namer()) << "\n";
  return os.str();
}

}  // namespace pqn
