#include "pqn/models.hpp"

#include <algorithm>

namespace pqn {

namespace {

ScalarField q(const Chart& c, int i) { return ScalarField::coordinate(c.q(i)); }
ScalarField p(const Chart& c, int i) { return ScalarField::coordinate(c.p(i)); }

Form d2(const Chart& c, int a, int b, const ScalarField& coeff) { return Form::monomial(c.dim(), {a, b}, coeff); }
Form d3(const Chart& c, int a, int b, int e, const ScalarField& coeff) {
  return Form::monomial(c.dim(), {a, b, e}, coeff);
}

// V(q_i - q_j)
ScalarField at_pair(const Chart& c, const ScalarField& v, int i, int j) {
  const std::vector<ScalarField> image{q(c, i) - q(c, j)};
  return v.substitute(image);
}

void check_pairs(const Chart& c, const std::vector<PairPotential>& v) {
  for (const auto& pot : v) {
    if (pot.i < 1 || pot.j > c.n || pot.i >= pot.j) {
      throw DomainError("pair potential indices must satisfy 1 <= i < j <= n");
    }
  }
}

std::string pair_label(int i, int j) { return std::to_string(i) + "," + std::to_string(j); }

bool all_ones(const std::vector<Rational>& f) {
  return std::all_of(f.begin(), f.end(), [](const Rational& r) { return r == 1; });
}

}  // namespace

PairPotential::PairPotential(int i_, int j_, ScalarField v_, std::optional<ScalarField> primitive_)
    : i(i_), j(j_), v(std::move(v_)), primitive(std::move(primitive_)) {
  if (i < 1 || j <= i) throw DomainError("pair potential indices must satisfy 1 <= i < j");
  if (v.max_coordinate() > 0) {
    throw UnsupportedFunction("pair potential V_" + pair_label(i, j) + " must depend on x only");
  }
  if (!primitive) primitive = v.antiderivative(0);
}

Bivector canonical_bivector(const Chart& chart) {
  Bivector pi(chart.dim());
  for (int i = 1; i <= chart.n; ++i) pi.set(chart.p(i), chart.q(i), ScalarField(1));
  return pi;
}

Tensor11 canonical_tensor(const Chart& chart) {
  Tensor11 t(chart.dim());
  for (int i = 1; i <= chart.n; ++i) {
    t(chart.q(i), chart.q(i)) = p(chart, i);
    t(chart.p(i), chart.p(i)) = p(chart, i);
  }
  return t;
}

Form canonical_symplectic(const Chart& chart) {
  Form w(chart.dim(), 2);
  for (int i = 1; i <= chart.n; ++i) w += d2(chart, chart.p(i), chart.q(i), ScalarField(1));
  return w;
}

Form omega_1(const Chart& chart) {
  Form w(chart.dim(), 2);
  for (int i = 1; i <= chart.n; ++i) w += d2(chart, chart.p(i), chart.q(i), p(chart, i));
  return w;
}

Form hamiltonian_operator(const Chart& chart) { return canonical_symplectic(chart) - omega_1(chart); }

Form vij_omega(const Chart& chart, const std::vector<PairPotential>& v) {
  check_pairs(chart, v);
  Form w(chart.dim(), 2);
  for (int i = 1; i <= chart.n; ++i) {
    for (int j = i + 1; j <= chart.n; ++j) w += d2(chart, chart.p(j), chart.p(i), ScalarField(1));
  }
  for (const auto& pot : v) w += d2(chart, chart.q(pot.j), chart.q(pot.i), at_pair(chart, pot.v, pot.i, pot.j));
  return w;
}

Tensor11 vij_tensor(const Chart& chart, const std::vector<PairPotential>& v) {
  check_pairs(chart, v);
  Tensor11 t = canonical_tensor(chart);
  for (int i = 1; i <= chart.n; ++i) {
    for (int j = i + 1; j <= chart.n; ++j) {
      t(chart.q(i), chart.p(j)) += ScalarField(1);
      t(chart.q(j), chart.p(i)) -= ScalarField(1);
    }
  }
  for (const auto& pot : v) {
    const ScalarField vij = at_pair(chart, pot.v, pot.i, pot.j);
    t(chart.p(pot.j), chart.q(pot.i)) += vij;
    t(chart.p(pot.i), chart.q(pot.j)) -= vij;
  }
  return t;
}

std::optional<Form> vij_theta(const Chart& chart, const std::vector<PairPotential>& v) {
  check_pairs(chart, v);
  Form theta(chart.dim(), 1);
  for (int i = 1; i <= chart.n; ++i) {
    for (int j = i + 1; j <= chart.n; ++j) theta += p(chart, j) * Form::differential(chart.dim(), chart.p(i));
  }
  for (const auto& pot : v) {
    if (!pot.primitive) return std::nullopt;
    theta -= at_pair(chart, *pot.primitive, pot.i, pot.j) * Form::differential(chart.dim(), chart.q(pot.i));
  }
  return theta;
}

Form vij_phi(const Chart& chart, const std::vector<PairPotential>& v) {
  check_pairs(chart, v);
  const int n = chart.n;
  Form phi(chart.dim(), 3);
  for (const auto& pot : v) {
    const int i = pot.i, j = pot.j;
    const ScalarField vij = at_pair(chart, pot.v, i, j);
    const ScalarField dv = at_pair(chart, pot.v.partial(0), i, j);
    phi += d3(chart, chart.q(i), chart.q(j), chart.p(i), vij);
    phi += d3(chart, chart.q(i), chart.q(j), chart.p(j), vij);
    auto delta = [](int a, int b) { return a == b ? 1 : 0; };
    for (int k = 1; k <= n; ++k) {
      for (int l = k + 1; l <= n; ++l) {
        const int ck = delta(i, l) - delta(j, l);
        const int cl = delta(j, k) - delta(i, k);
        if (ck != 0) phi += d3(chart, chart.q(i), chart.q(j), chart.p(k), ScalarField(ck) * dv);
        if (cl != 0) phi += d3(chart, chart.q(i), chart.q(j), chart.p(l), ScalarField(cl) * dv);
      }
    }
  }
  return phi;
}

std::vector<PairPotential> toda_potentials(int n, const std::vector<Rational>& f) {
  if (static_cast<int>(f.size()) != n) throw DomainError("closed Toda needs n constants f_i");
  const ScalarField x = ScalarField::coordinate(0);
  std::vector<PairPotential> v;
  for (int i = 1; i < n; ++i) {
    if (f[static_cast<std::size_t>(i - 1)] != 0) v.emplace_back(i, i + 1, ScalarField(f[static_cast<std::size_t>(i - 1)]) * exp(x));
  }
  if (f.back() != 0) v.emplace_back(1, n, ScalarField(f.back()) * exp(-x));
  return v;
}

std::vector<PairPotential> calogero_potentials(int n) {
  const ScalarField x = ScalarField::coordinate(0);
  std::vector<PairPotential> v;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) v.emplace_back(i, j, pow(x, -2));
  }
  return v;
}

Form open_toda_omega(const Chart& chart, const std::vector<Rational>& f) {
  std::vector<Rational> full = f;
  full.push_back(0);
  return vij_omega(chart, toda_potentials(chart.n, full));
}

Form omega_hat(const Chart& chart, const std::vector<Rational>& f) {
  return hamiltonian_operator(chart) + open_toda_omega(chart, f);
}

ModelBundle canonical_pn(int n) {
  const Chart chart(n);
  Form theta(chart.dim(), 1);
  for (int i = 1; i <= n; ++i) {
    const ScalarField pi_ = p(chart, i);
    theta += (pi_ - Rational(1, 2) * pi_ * pi_) * Form::differential(chart.dim(), chart.q(i));
  }
  ModelExpectation e;
  e.cls = StructureClass::PN;
  e.involutive = true;
  e.involutive_up_to = n;
  e.phi = Form(chart.dim(), std::min(3, chart.dim()));
  return ModelBundle{"canonical",
                     chart,
                     canonical_bivector(chart),
                     Tensor11::identity(chart.dim()),
                     hamiltonian_operator(chart),
                     canonical_tensor(chart),
                     theta,
                     e};
}

ModelBundle vij_model(int n, std::vector<PairPotential> v) {
  const Chart chart(n);
  ModelExpectation e;
  e.phi = vij_phi(chart, v);
  e.cls = e.phi->is_zero() ? StructureClass::PN : StructureClass::PqN;
  // {H_1, H_k} = 0 always, so two particles are always involutive.
  if (n == 2) {
    e.involutive = true;
    e.involutive_up_to = 2;
  }
  return ModelBundle{"vij",
                     chart,
                     canonical_bivector(chart),
                     canonical_tensor(chart),
                     vij_omega(chart, v),
                     vij_tensor(chart, v),
                     vij_theta(chart, v),
                     e};
}

ModelBundle closed_toda(int n, std::vector<Rational> f) {
  if (n < 2) throw DomainError("Toda lattice needs n >= 2");
  if (f.empty()) f.assign(static_cast<std::size_t>(n), Rational(1));
  ModelBundle m = vij_model(n, toda_potentials(n, f));
  m.name = "closed-toda";
  const Chart& c = m.chart;
  Form phi(c.dim(), 3);
  const ScalarField edge = ScalarField(2 * f.back()) * exp(q(c, n) - q(c, 1));
  for (int i = 1; i <= n; ++i) phi += d3(c, c.q(1), c.q(n), c.p(i), edge);
  m.expected.phi = phi;
  m.expected.cls = f.back() == 0 ? StructureClass::PN : StructureClass::PqN;
  if (f.back() == 0 || all_ones(f)) {
    m.expected.involutive = true;
    m.expected.involutive_up_to = n;
  } else {
    m.expected.involutive.reset();
    m.expected.involutive_up_to = 0;
  }
  return m;
}

ModelBundle open_toda(int n, std::vector<Rational> f) {
  if (n < 2) throw DomainError("Toda lattice needs n >= 2");
  if (f.empty()) f.assign(static_cast<std::size_t>(n - 1), Rational(1));
  if (static_cast<int>(f.size()) != n - 1) throw DomainError("open Toda needs n - 1 constants f_i");
  f.push_back(0);
  ModelBundle m = closed_toda(n, f);
  m.name = "open-toda";
  return m;
}

ModelBundle calogero(int n) {
  if (n < 2) throw DomainError("Calogero model needs n >= 2");
  ModelBundle m = vij_model(n, calogero_potentials(n));
  m.name = "calogero";
  m.expected.cls = StructureClass::PqN;
  m.expected.involutive = n <= 3;
  m.expected.involutive_up_to = n;
  return m;
}

TwoParticleFixture two_particle_fixture(std::optional<ScalarField> v) {
  TwoParticleFixture fx;
  const Chart& c = fx.chart;
  const ScalarField q1 = q(c, 1), q2 = q(c, 2), p1 = p(c, 1), p2 = p(c, 2);
  fx.v = v ? *v : exp(q1 - q2);
  const ScalarField V = fx.v;
  const ScalarField o(0), one(1), m1(-1);

  fx.pi_sharp = Tensor11::from_rows({{o, o, one, o}, {o, o, o, one}, {m1, o, o, o}, {o, m1, o, o}});
  fx.n = Tensor11::from_rows({{p1, o, o, o}, {o, p2, o, o}, {o, o, p1, o}, {o, o, o, p2}});
  fx.n_hat = Tensor11::from_rows({{p1, o, o, one}, {o, p2, m1, o}, {o, -V, p1, o}, {V, o, o, p2}});

  fx.omega = d2(c, c.q(2), c.q(1), V) + d2(c, c.p(2), c.p(1), one);
  fx.d_n_omega = d3(c, c.q(1), c.q(2), c.p(1), V) + d3(c, c.q(1), c.q(2), c.p(2), V);
  fx.omega_omega = d3(c, c.q(1), c.q(2), c.p(1), ScalarField(2) * V.partial(c.q(2))) -
                   d3(c, c.q(1), c.q(2), c.p(2), ScalarField(2) * V.partial(c.q(1)));
  return fx;
}

const std::vector<std::string>& known_models() {
  static const std::vector<std::string> names{"canonical", "closed-toda", "open-toda", "calogero", "vij"};
  return names;
}

ModelBundle make_model(const std::string& name, int n, const std::vector<Rational>& f,
                       const std::vector<PairPotential>& potentials) {
  if (name == "canonical") return canonical_pn(n);
  if (name == "closed-toda") return closed_toda(n, f);
  if (name == "open-toda") return open_toda(n, f);
  if (name == "calogero") return calogero(n);
  if (name == "vij") {
    if (potentials.empty()) throw DomainError("model 'vij' needs pair potentials");
    return vij_model(n, potentials);
  }
  std::string known;
  for (const auto& k : known_models()) known += (known.empty() ? "" : ", ") + k;
  throw DomainError("unknown model '" + name + "'; known models: " + known);
}

}  // namespace pqn
