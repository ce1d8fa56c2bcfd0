#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqn/calculus.hpp"

namespace pqn {

/// Candidate (pi, N, phi) on one chart; phi is the zero 3-form for PN candidates.
struct GeometricStructure {
  Chart chart;
  Bivector pi;
  Tensor11 n;
  Form phi;

  GeometricStructure(Chart c, Bivector p, Tensor11 t);
  GeometricStructure(Chart c, Bivector p, Tensor11 t, Form f);
};

struct CheckEntry {
  std::string axiom;
  bool pass = true;
  ZeroMode mode = ZeroMode::Symbolic;
  double residual = 0.0;
  std::optional<Point> witness;
  int samples = 0;
  bool informational = false;  // reported, but excluded from the overall verdict
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  ZeroTestConfig config;

  bool overall() const;
  const CheckEntry* find(std::string_view axiom) const;
  void append(const CheckReport& other);
};

/// Folds many component-wise zero tests into one report entry.
class EntryBuilder {
 public:
  EntryBuilder(std::string axiom, const std::vector<Point>& points, double tolerance);

  void require_zero(const ScalarField& f);
  void require_zero(const VectorField& v);
  void require_zero(const Form& a);
  void require_zero(const Tensor11& t);
  CheckEntry finish() const { return entry_; }

 private:
  CheckEntry entry_;
  const std::vector<Point>& points_;
  double tolerance_;
};

enum class StructureClass { PN, PqN };
std::string to_string(StructureClass c);

CheckReport check_poisson(const Chart& chart, const Bivector& pi, const ZeroTestConfig& cfg,
                          const std::string& prefix = "poisson");

CheckReport check_compatibility(const Chart& chart, const Bivector& pi, const Tensor11& n, const ZeroTestConfig& cfg);

CheckReport check_pqn(const GeometricStructure& s, const ZeroTestConfig& cfg);

CheckReport check_pn(const Chart& chart, const Bivector& pi, const Tensor11& n, const ZeroTestConfig& cfg);

/// pi_N with pi_N^sharp = N pi^sharp, taken from its upper triangle.
Bivector pi_N(const Bivector& pi, const Tensor11& n);

struct DeformResult {
  Tensor11 n_hat;
  Form phi;
  StructureClass classification;
  ZeroMode phi_mode;  // how phi = 0 (or not) was decided
  CheckReport report;
};

/// N_hat = N + pi^sharp Omega^flat and phi = d_N Omega + 1/2 [Omega, Omega]_pi.
/// Requires (pi, N) to be PN and d Omega = 0; otherwise throws HypothesisViolation.
DeformResult deform(const Chart& chart, const Bivector& pi, const Tensor11& n, const Form& omega,
                    const ZeroTestConfig& cfg);

/// Same construction without the hypothesis checks or the final PqN report.
Tensor11 deformed_tensor(const Bivector& pi, const Tensor11& n, const Form& omega);
Form deformation_phi(const Bivector& pi, const Tensor11& n, const Form& omega);

struct ConverseResult {
  Tensor11 n_hat;
  CheckReport report;
};

/// Converse direction: for a PqN structure (pi, N, phi) and a 2-form Omega with
/// -phi = d_N Omega + 1/2 [Omega, Omega]_pi, N + pi^sharp Omega^flat should be PN.
/// Reuses the deformation formula with the sign of phi flipped; no hypothesis
/// beyond that identity is checked.
ConverseResult deform_to_pn(const GeometricStructure& s, const Form& omega, const ZeroTestConfig& cfg);

/// H_k = Tr(N^k) / (2k) for k = 1..k_max.
std::vector<ScalarField> trace_invariants(const Tensor11& n, int k_max);

/// dH_{k+1} - N^* dH_k = 0 for k < k_max. With `informational` the residuals are
/// reported but do not enter the overall verdict (PqN tensors, where no recursion is claimed).
CheckReport recursion_check(const Chart& chart, const Bivector& pi, const Tensor11& n, int k_max,
                            const ZeroTestConfig& cfg, bool informational = false);

struct InvolutivityMatrix {
  int size = 0;
  std::vector<ZeroVerdict> cells;  // row-major, cell (j, k) is {H_{j+1}, H_{k+1}}

  const ZeroVerdict& operator()(int j, int k) const { return cells[static_cast<std::size_t>(j * size + k)]; }
  bool all_zero() const;
  bool all_zero_up_to(int k) const;
  double max_abs() const;
};

InvolutivityMatrix involutivity_matrix(const Chart& chart, const Bivector& pi, const std::vector<ScalarField>& h,
                                       const ZeroTestConfig& cfg);

/// Random test functions (polynomials plus an exponential of a coordinate
/// difference) drawn deterministically from the config seed.
std::vector<ScalarField> random_functions(const Chart& chart, int count, std::uint64_t seed);

}  // namespace pqn
