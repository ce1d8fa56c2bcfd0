#include "pqn/cli.hpp"

#include <chrono>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "pqn/serialize.hpp"

namespace pqn::cli {

using nlohmann::json;

namespace {

std::int64_t parse_int64(std::string_view s, const std::string& whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("not a rational number: '" + whole + "'");
  return v;
}

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<PairPotential> build_potentials(const std::vector<PotentialSpec>& specs) {
  std::vector<PairPotential> out;
  for (const auto& s : specs) out.emplace_back(s.i, s.j, normalize(parse_expr(s.v, univariate_resolver())));
  return out;
}

ModelBundle load_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw DomainError("no model given (--model)");
  return make_model(cfg.model, cfg.n, cfg.f, build_potentials(cfg.potentials));
}

ZeroTestConfig effective_zero_config(const RunConfig& cfg) {
  ZeroTestConfig z = cfg.zero;
  // (q_i - q_j)^{-3} terms lose digits near collisions.
  if (cfg.model == "calogero" && !cfg.tolerance_set) z.tolerance = 1e-7;
  z.validate();
  return z;
}

std::optional<StructureClass> parse_class(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  if (*s == "pn" || *s == "PN") return StructureClass::PN;
  if (*s == "pqn" || *s == "PqN") return StructureClass::PqN;
  throw DomainError("--expect must be 'pn' or 'pqn' here, got '" + *s + "'");
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

json base_json(const RunConfig& cfg, const CheckReport& r) {
  json j = report_to_json(r);
  j["command"] = cfg.command;
  j["config"] = config_echo(cfg);
  return j;
}

void header(std::ostream& out, const RunConfig& cfg, const ZeroTestConfig& z) {
  out << "pqn " << cfg.command;
  if (!cfg.model.empty() && cfg.command != "deform") out << "  model=" << cfg.model;
  out << "  n=" << cfg.n << "  seed=" << z.seed << "  samples=" << z.sample_count << "  tol=" << fmt(z.tolerance)
      << "\n";
}

// Entries of `extra` whose axiom is not already present in `r`.
void append_new(CheckReport& r, const CheckReport& extra) {
  for (const auto& e : extra.entries)
    if (!r.find(e.axiom)) r.entries.push_back(e);
}

Tensor11 base_tensor(const std::string& name, const Chart& chart) {
  if (name == "canonical") return canonical_tensor(chart);
  if (name == "identity") return Tensor11::identity(chart.dim());
  if (name == "zero") return Tensor11(chart.dim());
  throw DomainError("unknown base '" + name + "'; known bases: canonical, identity, zero");
}

Form named_omega(const RunConfig& cfg, const Chart& chart) {
  if (cfg.omega_form) return form_from_json(*cfg.omega_form, chart);
  std::string name = cfg.omega;
  bool negate = false;
  if (!name.empty() && name[0] == '-') {
    negate = true;
    name.erase(0, 1);
  }
  Form w(chart.dim(), 2);
  if (name == "zero") {
  } else if (name == "omega-c") {
    w = hamiltonian_operator(chart);
  } else if (name == "symplectic") {
    w = canonical_symplectic(chart);
  } else if (name == "omega-1") {
    w = omega_1(chart);
  } else if (name == "omega-hat") {
    std::vector<Rational> f = cfg.f;
    if (f.empty()) f.assign(static_cast<std::size_t>(chart.n - 1), Rational(1));
    w = omega_hat(chart, f);
  } else if (name == "closed-toda" || name == "open-toda" || name == "calogero" || name == "vij") {
    w = *make_model(name, chart.n, cfg.f, build_potentials(cfg.potentials)).omega;
  } else {
    throw DomainError("unknown omega '" + name +
                      "'; known: zero, omega-c, symplectic, omega-1, omega-hat, closed-toda, open-toda, calogero, "
                      "vij (prefix '-' to negate)");
  }
  return negate ? -w : w;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int64(text, text));
  const std::int64_t num = parse_int64(std::string_view(text).substr(0, slash), text);
  const std::int64_t den = parse_int64(std::string_view(text).substr(slash + 1), text);
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return Rational(num, den);
}

PotentialSpec parse_potential(const std::string& text) {
  const auto colon = text.find(':');
  const auto comma = text.find(',');
  if (colon == std::string::npos || comma == std::string::npos || comma > colon)
    throw ParseError("potential must look like 'i,j:expr', got '" + text + "'");
  PotentialSpec s;
  s.i = static_cast<int>(parse_int64(std::string_view(text).substr(0, comma), text));
  s.j = static_cast<int>(parse_int64(std::string_view(text).substr(comma + 1, colon - comma - 1), text));
  s.v = text.substr(colon + 1);
  return s;
}

void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  static const std::set<std::string> known{"model", "n", "f", "potentials", "kmax", "seed", "samples",
                                           "tol", "half_width", "separation", "format", "out", "expect",
                                           "base", "omega"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("model")) cfg.model = j["model"].get<std::string>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("f")) {
      cfg.f.clear();
      for (const auto& v : j["f"]) {
        cfg.f.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : Rational(v.get<std::int64_t>()));
      }
    }
    if (j.contains("potentials")) {
      cfg.potentials.clear();
      for (const auto& p : j["potentials"]) {
        for (const auto& [key, value] : p.items()) {
          if (key != "i" && key != "j" && key != "v") throw ParseError("unknown potential key '" + key + "'");
        }
        cfg.potentials.push_back({p.at("i").get<int>(), p.at("j").get<int>(), p.at("v").get<std::string>()});
      }
    }
    if (j.contains("kmax")) cfg.kmax = j["kmax"].get<int>();
    if (j.contains("seed")) cfg.zero.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) cfg.zero.sample_count = j["samples"].get<int>();
    if (j.contains("tol")) {
      cfg.zero.tolerance = j["tol"].get<double>();
      cfg.tolerance_set = true;
    }
    if (j.contains("half_width")) cfg.zero.half_width = j["half_width"].get<double>();
    if (j.contains("separation")) cfg.zero.separation = j["separation"].get<double>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("expect")) cfg.expect = j["expect"].get<std::string>();
    if (j.contains("base")) cfg.base = j["base"].get<std::string>();
    if (j.contains("omega")) {
      if (j["omega"].is_string()) {
        cfg.omega = j["omega"].get<std::string>();
        cfg.omega_form.reset();
      } else {
        cfg.omega_form = j["omega"];
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
}

json config_echo(const RunConfig& cfg) {
  json f = json::array();
  for (const auto& r : cfg.f) f.push_back(to_string(r));
  json pots = json::array();
  for (const auto& p : cfg.potentials) pots.push_back({{"i", p.i}, {"j", p.j}, {"v", p.v}});
  const ZeroTestConfig z = cfg.command.empty() ? cfg.zero : effective_zero_config(cfg);
  json j = {{"model", cfg.model}, {"n", cfg.n},     {"f", f},
            {"potentials", pots}, {"kmax", cfg.kmax ? json(*cfg.kmax) : json(nullptr)},
            {"expect", cfg.expect ? json(*cfg.expect) : json(nullptr)},
            {"zero_test", config_to_json(z)}};
  if (cfg.command == "deform") {
    j.erase("model");
    j["base"] = cfg.base;
    j["omega"] = cfg.omega_form ? *cfg.omega_form : json(cfg.omega);
  }
  return j;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelBundle m = load_model(cfg);
  const ZeroTestConfig z = effective_zero_config(cfg);
  const StructureClass expected = parse_class(cfg.expect).value_or(m.expected.cls);

  CheckReport report;
  StructureClass cls = StructureClass::PN;
  Tensor11 n_hat = m.n;
  if (m.omega) {
    const DeformResult d = deform(m.chart, m.pi, m.base_n, *m.omega, z);
    report = d.report;
    cls = d.classification;
    n_hat = d.n_hat;
    const auto points = sample_points(m.chart, z);
    EntryBuilder formula("model.n_hat_formula", points, z.tolerance);
    formula.require_zero(d.n_hat - m.n);
    report.entries.push_back(formula.finish());
    if (m.expected.phi) {
      EntryBuilder phi("model.phi_formula", points, z.tolerance);
      phi.require_zero(d.phi - *m.expected.phi);
      report.entries.push_back(phi.finish());
    }
  } else {
    report = check_pn(m.chart, m.pi, m.n, z);
  }
  if (cls == StructureClass::PN) append_new(report, check_pn(m.chart, m.pi, n_hat, z));
  report.config = z;

  const bool match = report.overall() && cls == expected;
  if (cfg.format == "json") {
    json j = base_json(cfg, report);
    j["classification"] = to_string(cls);
    j["expected"] = to_string(expected);
    j["match"] = match;
    out << j.dump(2) << "\n";
  } else {
    header(out, cfg, z);
    out << report_to_text(report);
    out << "classification: " << to_string(cls) << " (expected " << to_string(expected) << ")\n";
    out << "result: " << (match ? "match" : "MISMATCH") << "\n";
    out << "elapsed: " << fmt(elapsed_ms(t0), "%.1f") << " ms\n";
  }
  return match ? kMatch : kMismatch;
}

int cmd_involutivity(const RunConfig& cfg, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const int kmax = cfg.kmax.value_or(cfg.n);
  if (kmax < 1 || kmax > kMaxKmax)
    throw DomainError("kmax must be in 1.." + std::to_string(kMaxKmax) + ", got " + std::to_string(kmax));
  const ModelBundle m = load_model(cfg);
  const ZeroTestConfig z = effective_zero_config(cfg);

  std::optional<bool> claim = m.expected.involutive;
  int claim_up_to = m.expected.involutive_up_to;
  if (cfg.expect) {
    if (*cfg.expect == "involutive") {
      claim = true;
    } else if (*cfg.expect == "not-involutive") {
      claim = false;
    } else {
      throw DomainError("--expect must be 'involutive' or 'not-involutive' here, got '" + *cfg.expect + "'");
    }
    claim_up_to = kmax;
  }

  const auto h = trace_invariants(m.n, kmax);
  const InvolutivityMatrix mat = involutivity_matrix(m.chart, m.pi, h, z);

  std::string verdict;
  bool match = true;
  if (!claim) {
    verdict = "no claim for this model";
  } else if (*claim) {
    const int up = std::min(kmax, claim_up_to);
    match = mat.all_zero_up_to(up);
    verdict = "expected involutive up to k=" + std::to_string(up);
  } else if (kmax < claim_up_to) {
    verdict = "non-involutivity is claimed up to k=" + std::to_string(claim_up_to) + "; not asserted at kmax=" +
              std::to_string(kmax);
  } else {
    match = !mat.all_zero_up_to(claim_up_to);
    verdict = "expected a nonzero bracket with j, k <= " + std::to_string(claim_up_to);
  }

  if (cfg.format == "json") {
    CheckReport empty;
    empty.config = z;
    json j = base_json(cfg, empty);
    j.erase("entries");
    json hs = json::array();
    for (const auto& f : h) hs.push_back(f.to_string(m.chart.namer()));
    json rows = json::array();
    for (int a = 0; a < kmax; ++a) {
      json row = json::array();
      for (int b = 0; b < kmax; ++b) {
        const ZeroVerdict& v = mat(a, b);
        row.push_back({{"verdict", v.zero ? "zero" : "nonzero"},
                       {"mode", to_string(v.mode)},
                       {"residual", v.residual},
                       {"max_abs", v.max_abs},
                       {"witness", point_to_json(v.witness)}});
      }
      rows.push_back(row);
    }
    j["kmax"] = kmax;
    j["hamiltonians"] = hs;
    j["matrix"] = rows;
    j["expectation"] = verdict;
    j["match"] = match;
    j["overall"] = match ? "pass" : "fail";
    out << j.dump(2) << "\n";
  } else {
    header(out, cfg, z);
    for (int k = 0; k < kmax; ++k) out << "  H" << k + 1 << " = " << h[k].to_string(m.chart.namer()) << "\n";
    out << "  {H_j, H_k}: 0 = symbolically zero, ~ = zero at samples (max |.| shown), X = nonzero\n";
    const auto pad = [](std::string s) { return s.size() < 12 ? s + std::string(12 - s.size(), ' ') : s + " "; };
    out << "       ";
    for (int b = 0; b < kmax; ++b) out << "  " << pad("k=" + std::to_string(b + 1));
    out << "\n";
    for (int a = 0; a < kmax; ++a) {
      out << "  j=" << a + 1 << "  ";
      for (int b = 0; b < kmax; ++b) {
        const ZeroVerdict& v = mat(a, b);
        std::string cell;
        if (v.zero && v.mode == ZeroMode::Symbolic) {
          cell = "0";
        } else {
          cell = (v.zero ? "~" : "X") + fmt(v.max_abs, "%.2e");
        }
        out << "  " << pad(cell);
      }
      out << "\n";
    }
    out << verdict << "\n";
    out << "result: " << (match ? "match" : "MISMATCH") << "\n";
    out << "elapsed: " << fmt(elapsed_ms(t0), "%.1f") << " ms\n";
  }
  return match ? kMatch : kMismatch;
}

int cmd_deform(const RunConfig& cfg, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Chart chart(cfg.n);
  const ZeroTestConfig z = effective_zero_config(cfg);
  const Bivector pi = canonical_bivector(chart);
  const Tensor11 base = base_tensor(cfg.base, chart);
  const Form omega = named_omega(cfg, chart);
  if (!omega.is_zero() && omega.degree() != 2) throw DomainError("omega must be a 2-form");
  const std::optional<StructureClass> expected = parse_class(cfg.expect);

  const DeformResult d = deform(chart, pi, base, omega, z);
  CheckReport report = d.report;
  report.config = z;
  const bool match = report.overall() && (!expected || *expected == d.classification);

  if (cfg.format == "json") {
    json j = base_json(cfg, report);
    j["n_hat"] = tensor_to_json(d.n_hat, chart);
    j["phi"] = form_to_json(d.phi, chart);
    j["classification"] = to_string(d.classification);
    if (expected) j["expected"] = to_string(*expected);
    j["match"] = match;
    out << j.dump(2) << "\n";
  } else {
    header(out, cfg, z);
    out << "base=" << cfg.base << "  omega=" << (cfg.omega_form ? std::string("<config form>") : cfg.omega) << "\n";
    out << "N_hat (nonzero entries, row = output component):\n" << tensor_to_text(d.n_hat, chart);
    out << "phi:\n" << form_to_text(d.phi, chart);
    out << report_to_text(report);
    out << "classification: " << to_string(d.classification);
    if (expected) out << " (expected " << to_string(*expected) << ")";
    out << "\nresult: " << (match ? "match" : "MISMATCH") << "\n";
    out << "elapsed: " << fmt(elapsed_ms(t0), "%.1f") << " ms\n";
  }
  return match ? kMatch : kMismatch;
}

namespace {

struct FlagValues {
  std::string config;
  std::string model;
  int n = 0;
  std::vector<std::string> f;
  std::vector<std::string> v;
  int kmax = 0;
  std::uint64_t seed = 0;
  int samples = 0;
  double tol = 0;
  double half_width = 0;
  double separation = 0;
  std::string format;
  std::string out;
  std::string expect;
  std::string base;
  std::string omega;
};

struct Flags {
  CLI::Option* config;
  CLI::Option* model;
  CLI::Option* n;
  CLI::Option* f;
  CLI::Option* v;
  CLI::Option* kmax;
  CLI::Option* seed;
  CLI::Option* samples;
  CLI::Option* tol;
  CLI::Option* half_width;
  CLI::Option* separation;
  CLI::Option* format;
  CLI::Option* out;
  CLI::Option* expect;
  CLI::Option* base = nullptr;
  CLI::Option* omega = nullptr;
};

Flags add_flags(CLI::App* sub, FlagValues& fv, bool deform) {
  Flags fl{};
  fl.config = sub->add_option("--config", fv.config, "JSON config file; flags override its keys");
  if (!deform) fl.model = sub->add_option("--model", fv.model, "canonical, closed-toda, open-toda, calogero, vij");
  else fl.model = nullptr;
  fl.n = sub->add_option("--n", fv.n, "number of particles");
  fl.f = sub->add_option("--f", fv.f, "Toda constants f_i, comma separated rationals")->delimiter(',');
  fl.v = sub->add_option("--v", fv.v, "pair potential 'i,j:expr' in x (repeatable)");
  fl.kmax = sub->add_option("--kmax", fv.kmax, "highest trace invariant (default n, at most 8)");
  fl.seed = sub->add_option("--seed", fv.seed, "sampling seed");
  fl.samples = sub->add_option("--samples", fv.samples, "sample points per zero test");
  fl.tol = sub->add_option("--tol", fv.tol, "zero-test tolerance");
  fl.half_width = sub->add_option("--half-width", fv.half_width, "sampling box half-width");
  fl.separation = sub->add_option("--separation", fv.separation, "minimum |q_i - q_j| at sample points");
  fl.format = sub->add_option("--format", fv.format, "text or json");
  fl.out = sub->add_option("--out", fv.out, "write the report here instead of stdout");
  fl.expect = sub->add_option("--expect", fv.expect, "pn | pqn (check, deform); involutive | not-involutive");
  if (deform) {
    fl.base = sub->add_option("--base", fv.base, "base tensor: canonical, identity, zero");
    fl.omega = sub->add_option("--omega", fv.omega, "deformation 2-form name");
  }
  return fl;
}

RunConfig resolve(const std::string& command, const Flags& fl, const FlagValues& fv) {
  RunConfig cfg;
  cfg.command = command;
  if (fl.config->count()) {
    std::ifstream in(fv.config);
    if (!in) throw ParseError("cannot open config file '" + fv.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError("config file is not valid JSON: " + std::string(e.what()));
    }
    apply_config_json(cfg, j);
  }
  if (fl.model && fl.model->count()) cfg.model = fv.model;
  if (fl.n->count()) cfg.n = fv.n;
  if (fl.f->count()) {
    cfg.f.clear();
    for (const auto& s : fv.f) cfg.f.push_back(parse_rational(s));
  }
  if (fl.v->count()) {
    cfg.potentials.clear();
    for (const auto& s : fv.v) cfg.potentials.push_back(parse_potential(s));
  }
  if (fl.kmax->count()) cfg.kmax = fv.kmax;
  if (fl.seed->count()) cfg.zero.seed = fv.seed;
  if (fl.samples->count()) cfg.zero.sample_count = fv.samples;
  if (fl.tol->count()) {
    cfg.zero.tolerance = fv.tol;
    cfg.tolerance_set = true;
  }
  if (fl.half_width->count()) cfg.zero.half_width = fv.half_width;
  if (fl.separation->count()) cfg.zero.separation = fv.separation;
  if (fl.format->count()) cfg.format = fv.format;
  if (fl.out->count()) cfg.out = fv.out;
  if (fl.expect->count()) cfg.expect = fv.expect;
  if (fl.base && fl.base->count()) cfg.base = fv.base;
  if (fl.omega && fl.omega->count()) {
    cfg.omega = fv.omega;
    cfg.omega_form.reset();
  }
  if (cfg.format != "text" && cfg.format != "json") throw DomainError("--format must be text or json");
  if (cfg.n < 1) throw DomainError("--n must be >= 1");
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson-Nijenhuis and Poisson quasi-Nijenhuis structure checker", "pqn"};
  app.require_subcommand(1);
  FlagValues fv_check, fv_inv, fv_def;
  auto* check = app.add_subcommand("check", "classify a model as PN or PqN and verify every axiom");
  auto* inv = app.add_subcommand("involutivity", "tabulate {H_j, H_k} for the trace invariants");
  auto* def = app.add_subcommand("deform", "deform a PN structure by a closed 2-form");
  const Flags fl_check = add_flags(check, fv_check, false);
  const Flags fl_inv = add_flags(inv, fv_inv, false);
  const Flags fl_def = add_flags(def, fv_def, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kMatch : kConfigError;
  }

  RunConfig cfg;
  try {
    if (check->parsed()) cfg = resolve("check", fl_check, fv_check);
    else if (inv->parsed()) cfg = resolve("involutivity", fl_inv, fv_inv);
    else cfg = resolve("deform", fl_def, fv_def);
  } catch (const Error& e) {
    err << "pqn: " << e.what() << "\n";
    return kConfigError;
  }

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file) {
      err << "pqn: cannot write '" << cfg.out << "'\n";
      return kConfigError;
    }
  }
  std::ostream& sink = cfg.out.empty() ? out : file;

  try {
    if (cfg.command == "check") return cmd_check(cfg, sink);
    if (cfg.command == "involutivity") return cmd_involutivity(cfg, sink);
    return cmd_deform(cfg, sink);
  } catch (const HypothesisViolation& e) {
    err << "pqn: hypothesis violated: " << e.what() << "\n  residual=" << e.residual() << "\n  witness=(";
    for (std::size_t i = 0; i < e.witness().size(); ++i) err << (i ? ", " : "") << e.witness()[i];
    err << ")\n";
    return kMismatch;
  } catch (const EvaluationOverflow& e) {
    err << "pqn: " << e.what() << "\n";
    return kMismatch;
  } catch (const Error& e) {
    err << "pqn: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace pqn::cli
