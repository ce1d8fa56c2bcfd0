#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <sstream>

#include "pqn/cli.hpp"
#include "pqn/serialize.hpp"
#include "support.hpp"

using namespace pqn;
using namespace pqn::testing;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "pqn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pqn_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = temp_file(name);
  std::ofstream(p) << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

TEST(CliCheck, ClosedTodaIsPqN) {
  const CliRun r = run({"check", "--model", "closed-toda", "--n", "3"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("classification: PqN"), std::string::npos);
  EXPECT_NE(r.out.find("elapsed:"), std::string::npos);
}

TEST(CliCheck, OpenTodaIsPN) {
  const CliRun r = run({"check", "--model", "open-toda", "--n", "3"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("classification: PN"), std::string::npos);
  EXPECT_NE(r.out.find("torsion.zero"), std::string::npos);
}

TEST(CliCheck, ExpectationMismatch) {
  const CliRun r = run({"check", "--model", "closed-toda", "--n", "3", "--expect", "pn"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("MISMATCH"), std::string::npos);
}

TEST(CliCheck, UnknownModelListsKnownOnes) {
  const CliRun r = run({"check", "--model", "kepler", "--n", "3"});
  EXPECT_EQ(r.code, 2);
  for (const auto& name : known_models()) EXPECT_NE(r.err.find(name), std::string::npos) << name;
}

TEST(CliCheck, PairModelFromFlags) {
  const CliRun r = run({"check", "--model", "vij", "--n", "3", "--v", "1,2:(exp x)", "--v", "2,3:(^ x -2)"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("classification: PqN"), std::string::npos);
}

TEST(CliCheck, JsonSchema) {
  const CliRun r = run({"check", "--model", "closed-toda", "--n", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["tool_version"], kToolVersion);
  EXPECT_EQ(j["overall"], "pass");
  EXPECT_EQ(j["classification"], "PqN");
  EXPECT_EQ(j["config"]["zero_test"]["seed"], 20240521u);
  ASSERT_TRUE(j["entries"].is_array());
  for (const auto& e : j["entries"]) {
    for (const char* key : {"axiom", "verdict", "residual", "witness", "mode"}) EXPECT_TRUE(e.contains(key)) << key;
    EXPECT_TRUE(e["mode"] == "symbolic" || e["mode"] == "sampled");
  }
}

TEST(CliCheck, JsonIsByteDeterministic) {
  const std::vector<std::string> args{"check", "--model", "closed-toda", "--n", "3", "--format", "json", "--seed", "7"};
  const CliRun a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  const fs::path out = temp_file("det.json");
  std::vector<std::string> with_out = args;
  with_out.insert(with_out.end(), {"--out", out.string()});
  EXPECT_EQ(run(with_out).code, 0);
  EXPECT_EQ(slurp(out), a.out);
  const CliRun other = run({"check", "--model", "closed-toda", "--n", "3", "--format", "json", "--seed", "8"});
  EXPECT_NE(other.out, a.out);
}

TEST(CliInvolutivity, CalogeroThreeIsInvolutive) {
  const CliRun r = run({"involutivity", "--model", "calogero", "--n", "3", "--kmax", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  for (const auto& row : json::parse(r.out)["matrix"])
    for (const auto& cell : row) EXPECT_NE(cell["verdict"], "nonzero");
  EXPECT_NE(run({"involutivity", "--model", "calogero", "--n", "3"}).out.find("result: match"), std::string::npos);
}

TEST(CliInvolutivity, CalogeroFourIsNot) {
  const CliRun r = run({"involutivity", "--model", "calogero", "--n", "4", "--kmax", "4", "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const json j = json::parse(r.out);
  bool nonzero = false;
  for (const auto& row : j["matrix"])
    for (const auto& cell : row) nonzero = nonzero || cell["verdict"] == "nonzero";
  EXPECT_TRUE(nonzero);
  EXPECT_EQ(run({"involutivity", "--model", "calogero", "--n", "4", "--expect", "involutive"}).code, 1);
}

TEST(CliInvolutivity, ClosedTodaTwo) {
  const CliRun r = run({"involutivity", "--model", "closed-toda", "--n", "2", "--kmax", "2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(CliInvolutivity, KmaxGuard) {
  EXPECT_EQ(run({"involutivity", "--model", "calogero", "--n", "3", "--kmax", "9"}).code, 2);
  EXPECT_EQ(run({"involutivity", "--model", "calogero", "--n", "3", "--kmax", "0"}).code, 2);
}

TEST(CliDeform, ClosedTodaPhiMatchesClosedForm) {
  const CliRun r = run({"deform", "--base", "canonical", "--omega", "closed-toda", "--n", "3", "--f", "1,1,1",
                     "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const Chart c(3);
  EXPECT_EQ(form_from_json(j["phi"], c), *closed_toda(3).expected.phi);
  EXPECT_EQ(tensor_from_json(j["n_hat"], c), closed_toda(3).n);
  EXPECT_EQ(j["classification"], "PqN");
}

TEST(CliDeform, ZeroOmegaEchoesBase) {
  const CliRun r = run({"deform", "--base", "canonical", "--omega", "zero", "--n", "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const Chart c(2);
  EXPECT_EQ(tensor_from_json(j["n_hat"], c), canonical_tensor(c));
  EXPECT_TRUE(form_from_json(j["phi"], c).is_zero());
}

TEST(CliDeform, OmegaHatFromIdentityGivesOpenToda) {
  const CliRun r = run({"deform", "--base", "identity", "--omega", "omega-hat", "--n", "3", "--format", "json",
                     "--expect", "pn"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(tensor_from_json(json::parse(r.out)["n_hat"], Chart(3)), open_toda(3).n);
}

TEST(CliDeform, NegatedSymplecticFromZero) {
  const CliRun r = run({"deform", "--base", "zero", "--omega", "-symplectic", "--n", "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(tensor_from_json(json::parse(r.out)["n_hat"], Chart(2)), Tensor11::identity(4));
}

TEST(CliDeform, NonClosedOmegaExitsOneWithWitness) {
  const fs::path cfg = write_file("open_omega.json", R"J({
    "n": 2,
    "base": "canonical",
    "omega": {"degree": 2, "terms": [{"indices": [2, 4], "coeff": "q1"}]}
  })J");
  const CliRun r = run({"deform", "--config", cfg.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("witness=("), std::string::npos) << r.err;
}

TEST(CliDeform, ExpectationMismatch) {
  EXPECT_EQ(run({"deform", "--omega", "closed-toda", "--n", "3", "--expect", "pn"}).code, 1);
}

TEST(CliConfig, FileAndOverrides) {
  const fs::path cfg = write_file("ok.json", R"J({"model": "open-toda", "n": 3, "f": [1, "2"], "samples": 20})J");
  CliRun r = run({"check", "--config", cfg.string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j["config"]["model"], "open-toda");
  EXPECT_EQ(j["config"]["zero_test"]["sample_count"], 20);
  EXPECT_EQ(j["config"]["f"], json({"1", "2"}));
  r = run({"check", "--config", cfg.string(), "--format", "json", "--samples", "30", "--model", "closed-toda",
           "--f", "1,1,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  EXPECT_EQ(j["config"]["model"], "closed-toda");
  EXPECT_EQ(j["config"]["zero_test"]["sample_count"], 30);
}

TEST(CliConfig, PotentialsInFile) {
  const fs::path cfg = write_file(
      "vij.json", R"J({"model": "vij", "n": 2, "potentials": [{"i": 1, "j": 2, "v": "(* 3 (exp x))"}]})J");
  EXPECT_EQ(run({"check", "--config", cfg.string()}).code, 0);
}

TEST(CliConfig, ErrorsExitTwo) {
  const fs::path unknown = write_file("unknown.json", R"J({"model": "calogero", "n": 3, "colour": "red"})J");
  const fs::path broken = write_file("broken.json", R"J({"model": )J");
  const fs::path badpot = write_file("badpot.json", R"J({"model": "vij", "potentials": [{"i": 1, "j": 2, "w": "x"}]})J");
  const std::vector<std::vector<std::string>> cases{
      {"check", "--config", unknown.string()},
      {"check", "--config", broken.string()},
      {"check", "--config", badpot.string()},
      {"check", "--config", temp_file("missing.json").string()},
      {"check", "--model", "calogero", "--format", "yaml"},
      {"check", "--model", "closed-toda", "--f", "1,x,1"},
      {"check", "--model", "closed-toda", "--n", "3", "--f", "1,1"},
      {"check", "--model", "closed-toda", "--n", "3", "--tol", "0"},
      {"check", "--model", "closed-toda", "--n", "3", "--expect", "maybe"},
      {"check", "--model", "vij", "--n", "3", "--v", "1,2:(exp (^ x 2))"},
      {"check", "--n", "3"},
      {"check", "--model", "calogero", "--n", "0"},
      {"check", "--model", "calogero", "--bogus"},
      {"deform", "--base", "nilpotent"},
      {"deform", "--omega", "mystery"},
      {"frobnicate"},
      {},
  };
  for (const auto& c : cases) {
    const CliRun r = run(c);
    std::string joined;
    for (const auto& a : c) joined += a + " ";
    EXPECT_EQ(r.code, 2) << joined << "\n" << r.out << r.err;
    EXPECT_FALSE(r.err.empty()) << joined;
  }
}

TEST(CliConfig, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("involutivity"), std::string::npos);
}

TEST(CliConfig, ParseHelpers) {
  EXPECT_EQ(cli::parse_rational("-3/4"), Rational(-3, 4));
  EXPECT_THROW(cli::parse_rational("1/0"), ParseError);
  const cli::PotentialSpec s = cli::parse_potential("2,3:(^ x -2)");
  EXPECT_EQ(s.i, 2);
  EXPECT_EQ(s.j, 3);
  EXPECT_EQ(s.v, "(^ x -2)");
}

int system_exit(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliProcess, ExitCodes) {
  const std::string bin = PQN_BINARY;
  EXPECT_EQ(system_exit(bin + " check --model closed-toda --n 3"), 0);
  EXPECT_EQ(system_exit(bin + " check --model closed-toda --n 3 --expect pn"), 1);
  EXPECT_EQ(system_exit(bin + " involutivity --model calogero --n 3 --kmax 9"), 2);
}

}  // namespace
