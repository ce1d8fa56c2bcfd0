#include "pqn/structures.hpp"

#include <algorithm>
#include <random>

namespace pqn {

namespace {

Form zero_phi(const Chart& chart) { return Form(chart.dim(), std::min(3, chart.dim())); }

// L_{pi# a}(N) X - pi# L_X(N^* a) + pi# L_{NX} a
VectorField concomitant(const Bivector& pi, const Tensor11& n, const Form& alpha, const VectorField& x) {
  const VectorField y = pi_sharp(pi, alpha);
  const VectorField nx = n.apply(x);
  VectorField out = lie_bracket(y, nx) - n.apply(lie_bracket(y, x));
  out -= pi_sharp(pi, lie_derivative(x, i_N(n, alpha)));
  out += pi_sharp(pi, lie_derivative(nx, alpha));
  return out;
}

}  // namespace

GeometricStructure::GeometricStructure(Chart c, Bivector p, Tensor11 t)
    : GeometricStructure(c, std::move(p), std::move(t), zero_phi(c)) {}

GeometricStructure::GeometricStructure(Chart c, Bivector p, Tensor11 t, Form f)
    : chart(c), pi(std::move(p)), n(std::move(t)), phi(std::move(f)) {
  if (pi.dim() != chart.dim() || n.dim() != chart.dim() || phi.dim() != chart.dim()) {
    throw DomainError("structure components live on different charts");
  }
  if (!phi.is_zero() && phi.degree() != 3) throw DomainError("phi must be a 3-form");
}

bool CheckReport::overall() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.pass || e.informational; });
}

const CheckEntry* CheckReport::find(std::string_view axiom) const {
  for (const auto& e : entries) {
    if (e.axiom == axiom) return &e;
  }
  return nullptr;
}

void CheckReport::append(const CheckReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

EntryBuilder::EntryBuilder(std::string axiom, const std::vector<Point>& points, double tolerance)
    : points_(points), tolerance_(tolerance) {
  entry_.axiom = std::move(axiom);
}

void EntryBuilder::require_zero(const ScalarField& f) {
  if (f.is_zero()) return;
  const ZeroVerdict v = is_zero(f, points_, tolerance_);
  entry_.mode = ZeroMode::Sampled;
  entry_.samples += v.samples;
  if (!entry_.witness || v.residual > entry_.residual) {
    entry_.residual = v.residual;
    entry_.witness = v.witness;
  }
  entry_.pass = entry_.pass && v.zero;
}

void EntryBuilder::require_zero(const VectorField& v) {
  for (const auto& c : v.components()) require_zero(c);
}

void EntryBuilder::require_zero(const Form& a) {
  for (const auto& [idx, c] : a.terms()) require_zero(c);
}

void EntryBuilder::require_zero(const Tensor11& t) {
  for (int i = 0; i < t.dim(); ++i) {
    for (int j = 0; j < t.dim(); ++j) require_zero(t(i, j));
  }
}

std::string to_string(StructureClass c) { return c == StructureClass::PN ? "PN" : "PqN"; }

CheckReport check_poisson(const Chart& chart, const Bivector& pi, const ZeroTestConfig& cfg,
                          const std::string& prefix) {
  const int d = chart.dim();
  const auto points = sample_points(chart, cfg);
  EntryBuilder jacobi(prefix + ".jacobi", points, cfg.tolerance);
  auto bracket_with = [&](int a, const ScalarField& f) {
    ScalarField out;
    for (int e = 0; e < d; ++e) {
      if (!pi(a, e).is_zero()) out += pi(a, e) * f.partial(e);
    }
    return out;
  };
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      for (int c = b + 1; c < d; ++c) {
        jacobi.require_zero(bracket_with(a, pi(b, c)) + bracket_with(b, pi(c, a)) + bracket_with(c, pi(a, b)));
      }
    }
  }
  CheckReport r;
  r.config = cfg;
  r.entries.push_back(jacobi.finish());
  return r;
}

CheckReport check_compatibility(const Chart& chart, const Bivector& pi, const Tensor11& n, const ZeroTestConfig& cfg) {
  const int d = chart.dim();
  const auto points = sample_points(chart, cfg);
  EntryBuilder first("compat.N_pi_sharp", points, cfg.tolerance);
  for (int j = 0; j < d; ++j) {
    const Form dx = Form::differential(d, j);
    first.require_zero(n.apply(pi_sharp(pi, dx)) - pi_sharp(pi, i_N(n, dx)));
  }
  EntryBuilder second("compat.concomitant", points, cfg.tolerance);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      second.require_zero(concomitant(pi, n, Form::differential(d, i), VectorField::coordinate(d, j)));
    }
  }
  const auto fs = random_functions(chart, 10, cfg.seed + 1);
  std::mt19937_64 rng(cfg.seed + 2);
  std::uniform_int_distribution<int> pick(0, d - 1);
  for (int k = 0; k < 5; ++k) {
    const Form alpha = fs[static_cast<std::size_t>(2 * k)] * Form::differential(d, pick(rng));
    const VectorField x = fs[static_cast<std::size_t>(2 * k + 1)] * VectorField::coordinate(d, pick(rng));
    second.require_zero(concomitant(pi, n, alpha, x));
  }
  CheckReport r;
  r.config = cfg;
  r.entries.push_back(first.finish());
  r.entries.push_back(second.finish());
  return r;
}

CheckReport check_pqn(const GeometricStructure& s, const ZeroTestConfig& cfg) {
  const int d = s.chart.dim();
  const auto points = sample_points(s.chart, cfg);
  CheckReport r = check_poisson(s.chart, s.pi, cfg);
  r.append(check_compatibility(s.chart, s.pi, s.n, cfg));

  EntryBuilder closed("phi.closed", points, cfg.tolerance);
  EntryBuilder closed_n("i_N_phi.closed", points, cfg.tolerance);
  if (!s.phi.is_zero() && s.phi.degree() < d) {
    closed.require_zero(cartan_d(s.phi));
    closed_n.require_zero(cartan_d(i_N(s.n, s.phi)));
  }
  r.entries.push_back(closed.finish());
  r.entries.push_back(closed_n.finish());

  EntryBuilder torsion("torsion.phi_identity", points, cfg.tolerance);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const VectorField x = VectorField::coordinate(d, j);
      const VectorField y = VectorField::coordinate(d, k);
      VectorField rhs(d);
      if (!s.phi.is_zero()) rhs = pi_sharp(s.pi, interior(y, interior(x, s.phi)));
      torsion.require_zero(nijenhuis_torsion(s.n, x, y) - rhs);
    }
  }
  r.entries.push_back(torsion.finish());

  EntryBuilder square("d_N_squared.phi_bracket", points, cfg.tolerance);
  for (const auto& f : random_functions(s.chart, 5, cfg.seed + 3)) {
    const Form fn = Form::function(d, f);
    Form lhs = d_N(s.n, d_N(s.n, fn));
    if (!s.phi.is_zero()) lhs -= koszul_bracket(s.pi, s.phi, fn);
    square.require_zero(lhs);
  }
  r.entries.push_back(square.finish());
  r.config = cfg;
  return r;
}

Bivector pi_N(const Bivector& pi, const Tensor11& n) {
  const int d = pi.dim();
  Bivector out(d);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      ScalarField v;
      for (int c = 0; c < d; ++c) {
        if (!n(b, c).is_zero() && !pi(a, c).is_zero()) v += n(b, c) * pi(a, c);
      }
      out.set(a, b, v);
    }
  }
  return out;
}

CheckReport check_pn(const Chart& chart, const Bivector& pi, const Tensor11& n, const ZeroTestConfig& cfg) {
  const int d = chart.dim();
  const auto points = sample_points(chart, cfg);
  CheckReport r = check_poisson(chart, pi, cfg);
  r.append(check_compatibility(chart, pi, n, cfg));

  EntryBuilder torsion("torsion.zero", points, cfg.tolerance);
  const Torsion12 t = nijenhuis_torsion(n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = j + 1; k < d; ++k) torsion.require_zero(t(i, j, k));
    }
  }
  r.entries.push_back(torsion.finish());

  // pi_N^{ab} = (N pi# dx_a)^b must be antisymmetric before it can be Poisson.
  EntryBuilder anti("pi_N.antisymmetric", points, cfg.tolerance);
  for (int a = 0; a < d; ++a) {
    const VectorField col = n.apply(pi_sharp(pi, Form::differential(d, a)));
    for (int b = a; b < d; ++b) {
      const VectorField row = n.apply(pi_sharp(pi, Form::differential(d, b)));
      anti.require_zero(col[b] + row[a]);
    }
  }
  r.entries.push_back(anti.finish());
  r.append(check_poisson(chart, pi_N(pi, n), cfg, "pi_N"));
  r.config = cfg;
  return r;
}

Tensor11 deformed_tensor(const Bivector& pi, const Tensor11& n, const Form& omega) {
  const int d = n.dim();
  Tensor11 out = n;
  if (omega.is_zero()) return out;
  for (int j = 0; j < d; ++j) {
    const VectorField col = pi_sharp(pi, omega_flat(omega, VectorField::coordinate(d, j)));
    for (int i = 0; i < d; ++i) out(i, j) += col[i];
  }
  return out;
}

Form deformation_phi(const Bivector& pi, const Tensor11& n, const Form& omega) {
  const int d = n.dim();
  if (omega.is_zero() || d < 3) return Form(d, std::min(3, d));
  Form phi = d_N(n, omega);
  phi += Rational(1, 2) * koszul_bracket(pi, omega, omega);
  return phi;
}

DeformResult deform(const Chart& chart, const Bivector& pi, const Tensor11& n, const Form& omega,
                    const ZeroTestConfig& cfg) {
  cfg.validate();
  const int d = chart.dim();
  if (!omega.is_zero() && omega.degree() != 2) throw DomainError("deformation needs a 2-form");
  if (omega.dim() != d || pi.dim() != d || n.dim() != d) throw DomainError("deform: chart dimensions differ");

  const CheckReport base = check_pn(chart, pi, n, cfg);
  for (const auto& e : base.entries) {
    if (!e.pass) {
      throw HypothesisViolation("base structure is not Poisson-Nijenhuis: " + e.axiom + " fails",
                                e.witness.value_or(Point{}), e.residual);
    }
  }
  const auto points = sample_points(chart, cfg);
  EntryBuilder closed("deform.omega_closed", points, cfg.tolerance);
  if (!omega.is_zero() && d > 2) closed.require_zero(cartan_d(omega));
  const CheckEntry closed_entry = closed.finish();
  if (!closed_entry.pass) {
    throw HypothesisViolation("deformation 2-form is not closed", closed_entry.witness.value_or(Point{}),
                              closed_entry.residual);
  }

  DeformResult out{deformed_tensor(pi, n, omega), deformation_phi(pi, n, omega), StructureClass::PN,
                   ZeroMode::Symbolic, CheckReport{}};
  EntryBuilder phi_zero("deform.phi_vanishes", points, cfg.tolerance);
  phi_zero.require_zero(out.phi);
  CheckEntry phi_entry = phi_zero.finish();
  out.classification = phi_entry.pass ? StructureClass::PN : StructureClass::PqN;
  out.phi_mode = phi_entry.mode;
  phi_entry.informational = true;

  out.report = check_pqn(GeometricStructure(chart, pi, out.n_hat, out.phi), cfg);
  out.report.entries.insert(out.report.entries.begin(), closed_entry);
  out.report.entries.push_back(phi_entry);
  return out;
}

ConverseResult deform_to_pn(const GeometricStructure& s, const Form& omega, const ZeroTestConfig& cfg) {
  cfg.validate();
  const auto points = sample_points(s.chart, cfg);
  EntryBuilder cancels("converse.phi_cancels", points, cfg.tolerance);
  cancels.require_zero(deformation_phi(s.pi, s.n, omega) + s.phi);
  ConverseResult out{deformed_tensor(s.pi, s.n, omega), CheckReport{}};
  out.report.config = cfg;
  out.report.entries.push_back(cancels.finish());
  out.report.append(check_pn(s.chart, s.pi, out.n_hat, cfg));
  return out;
}

std::vector<ScalarField> trace_invariants(const Tensor11& n, int k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  std::vector<ScalarField> h;
  Tensor11 power = n;
  for (int k = 1; k <= k_max; ++k) {
    h.push_back(ScalarField(Rational(1, 2 * k)) * power.trace());
    if (k < k_max) power = power * n;
  }
  return h;
}

CheckReport recursion_check(const Chart& chart, const Bivector& /*pi*/, const Tensor11& n, int k_max,
                            const ZeroTestConfig& cfg, bool informational) {
  const int d = chart.dim();
  const auto points = sample_points(chart, cfg);
  const auto h = trace_invariants(n, k_max);
  CheckReport r;
  r.config = cfg;
  for (int k = 1; k < k_max; ++k) {
    EntryBuilder e("recursion.k" + std::to_string(k), points, cfg.tolerance);
    const Form dhk = cartan_d(Form::function(d, h[static_cast<std::size_t>(k - 1)]));
    const Form dhk1 = cartan_d(Form::function(d, h[static_cast<std::size_t>(k)]));
    e.require_zero(dhk1 - i_N(n, dhk));
    CheckEntry entry = e.finish();
    entry.informational = informational;
    r.entries.push_back(entry);
  }
  return r;
}

bool InvolutivityMatrix::all_zero() const { return all_zero_up_to(size); }

bool InvolutivityMatrix::all_zero_up_to(int k) const {
  const int m = std::min(k, size);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!(*this)(i, j).zero) return false;
    }
  }
  return true;
}

double InvolutivityMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& c : cells) m = std::max(m, c.max_abs);
  return m;
}

InvolutivityMatrix involutivity_matrix(const Chart& chart, const Bivector& pi, const std::vector<ScalarField>& h,
                                       const ZeroTestConfig& cfg) {
  cfg.validate();
  const auto points = sample_points(chart, cfg);
  InvolutivityMatrix m;
  m.size = static_cast<int>(h.size());
  m.cells.resize(h.size() * h.size());
  for (int j = 0; j < m.size; ++j) {
    for (int k = j; k < m.size; ++k) {
      const ScalarField b = poisson_bracket(pi, h[static_cast<std::size_t>(j)], h[static_cast<std::size_t>(k)]);
      const ZeroVerdict v = is_zero(b, points, cfg.tolerance);
      m.cells[static_cast<std::size_t>(j * m.size + k)] = v;
      m.cells[static_cast<std::size_t>(k * m.size + j)] = v;
    }
  }
  return m;
}

std::vector<ScalarField> random_functions(const Chart& chart, int count, std::uint64_t seed) {
  const int d = chart.dim();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> coord(0, d - 1);
  std::uniform_int_distribution<int> coeff(-3, 3);
  auto nonzero = [&] {
    int c = 0;
    while (c == 0) c = coeff(rng);
    return c;
  };
  std::vector<ScalarField> out;
  for (int k = 0; k < count; ++k) {
    ScalarField f(nonzero());
    f += ScalarField(nonzero()) * ScalarField::coordinate(coord(rng));
    f += ScalarField(nonzero()) * ScalarField::coordinate(coord(rng)) * ScalarField::coordinate(coord(rng));
    f += ScalarField(nonzero()) * pow(ScalarField::coordinate(coord(rng)), 3);
    if (d >= 2) {
      const int a = coord(rng);
      const int b = (a + 1 + coord(rng) % (d - 1)) % d;
      f += ScalarField(nonzero()) * exp(ScalarField::coordinate(a) - ScalarField::coordinate(b));
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace pqn
