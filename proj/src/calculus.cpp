#include "pqn/calculus.hpp"

#include <algorithm>

namespace pqn {

namespace {

int sort_with_sign(Form::Index& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] == idx[i - 1]) return 0;
  }
  return sign;
}

Form basis(int dim, const Form::Index& sorted) {
  Form out(dim, static_cast<int>(sorted.size()));
  out.accumulate(sorted, ScalarField(1));
  return out;
}

// dx_{I<k} ^ middle ^ dx_{I>k}
Form sandwich(int dim, const Form::Index& idx, std::size_t k, const Form& middle) {
  const Form::Index before(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  const Form::Index after(idx.begin() + static_cast<std::ptrdiff_t>(k) + 1, idx.end());
  return wedge(wedge(basis(dim, before), middle), basis(dim, after));
}

// {x_j, g} = pi^{jb} d_b g
ScalarField coordinate_bracket(const Bivector& pi, int j, const ScalarField& g) {
  ScalarField out;
  for (int b = 0; b < pi.dim(); ++b) {
    if (!pi(j, b).is_zero()) out += pi(j, b) * g.partial(b);
  }
  return out;
}

// [h, g dx_I]: the bracket with a function is a derivation of degree -1,
// with [h, g] = 0 and [h, dx_i] = -[dx_i, h] = -{x_i, h}.
Form bracket_function_left(const Bivector& pi, const ScalarField& h, const ScalarField& g, const Form::Index& idx) {
  const int dim = pi.dim();
  Form out(dim, std::max(static_cast<int>(idx.size()) - 1, 0));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const ScalarField c = coordinate_bracket(pi, idx[k], h);
    if (c.is_zero()) continue;
    Form::Index rest = idx;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    const ScalarField v = g * c;
    out.accumulate(rest, k % 2 == 0 ? -v : v);
  }
  return out;
}

// [dx_j, g dx_I]: derivation of degree 0 with [dx_j, g] = {x_j, g} and
// [dx_j, dx_i] = d pi^{ji}.
Form bracket_differential_left(const Bivector& pi, int j, const ScalarField& g, const Form::Index& idx) {
  const int dim = pi.dim();
  Form out(dim, static_cast<int>(idx.size()));
  const ScalarField jg = coordinate_bracket(pi, j, g);
  if (!jg.is_zero()) out.accumulate(idx, jg);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const ScalarField& entry = pi(j, idx[k]);
    if (entry.as_constant()) continue;
    out += g * sandwich(dim, idx, k, cartan_d(Form::function(dim, entry)));
  }
  return out;
}

// [g dx_I, h dx_J], peeling the right argument with the derivation rule and
// flipping with graded antisymmetry at the base cases.
Form bracket_monomials(const Bivector& pi, const ScalarField& g, const Form::Index& lhs, const ScalarField& h,
                       const Form::Index& rhs) {
  const int dim = pi.dim();
  const int p = static_cast<int>(lhs.size());
  const int q = static_cast<int>(rhs.size());
  Form out(dim, std::max(p + q - 1, 0));
  if (p + q - 1 < 0 || p + q - 1 > dim) return out;

  // [eta, h] ^ dx_J with [eta, h] = (-1)^p [h, eta].
  if (p > 0) {
    Form eta_h = bracket_function_left(pi, h, g, lhs);
    if (p % 2 == 1) eta_h = -eta_h;
    out += wedge(eta_h, basis(dim, rhs));
  }
  // h * sum_k (-1)^{(p-1)k} dx_{J<k} ^ [eta, dx_{J_k}] ^ dx_{J>k}, [eta, dx_j] = -[dx_j, eta].
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    Form eta_dx = -bracket_differential_left(pi, rhs[k], g, lhs);
    if (eta_dx.is_zero()) continue;
    if (((p - 1) * static_cast<int>(k)) % 2 != 0) eta_dx = -eta_dx;
    out += h * sandwich(dim, rhs, k, eta_dx);
  }
  return out;
}

}  // namespace

Form cartan_d(const Form& a) {
  if (a.degree() >= a.dim() && !a.is_zero()) throw DomainError("cartan_d of a top-degree form");
  Form out(a.dim(), std::min(a.degree() + 1, a.dim()));
  for (const auto& [idx, f] : a.terms()) {
    for (int i = 0; i < a.dim(); ++i) {
      if (std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
      const ScalarField df = f.partial(i);
      if (df.is_zero()) continue;
      Form::Index k = idx;
      k.insert(k.begin(), i);
      const int sign = sort_with_sign(k);
      out.accumulate(k, sign > 0 ? df : -df);
    }
  }
  return out;
}

Form d_N(const Tensor11& n, const Form& a) {
  Form out = i_N(n, cartan_d(a));
  if (a.degree() > 0) out -= cartan_d(i_N(n, a));
  return out;
}

Torsion12::Torsion12(int dim) : dim_(dim), t_(static_cast<std::size_t>(dim * dim * dim)) {}

void Torsion12::set_pair(int j, int k, const VectorField& value) {
  for (int i = 0; i < dim_; ++i) {
    t_[idx(i, j, k)] = value[i];
    t_[idx(i, k, j)] = -value[i];
  }
}

VectorField Torsion12::operator()(const VectorField& x, const VectorField& y) const {
  VectorField out(dim_);
  for (int j = 0; j < dim_; ++j) {
    if (x[j].is_zero()) continue;
    for (int k = 0; k < dim_; ++k) {
      if (y[k].is_zero()) continue;
      const ScalarField xy = x[j] * y[k];
      for (int i = 0; i < dim_; ++i) {
        const auto& t = (*this)(i, j, k);
        if (!t.is_zero()) out[i] += t * xy;
      }
    }
  }
  return out;
}

bool Torsion12::is_structurally_zero() const {
  return std::all_of(t_.begin(), t_.end(), [](const ScalarField& f) { return f.is_zero(); });
}

VectorField nijenhuis_torsion(const Tensor11& n, const VectorField& x, const VectorField& y) {
  const VectorField nx = n.apply(x);
  const VectorField ny = n.apply(y);
  const VectorField inner = lie_bracket(nx, y) + lie_bracket(x, ny) - n.apply(lie_bracket(x, y));
  return lie_bracket(nx, ny) - n.apply(inner);
}

Torsion12 nijenhuis_torsion(const Tensor11& n) {
  const int d = n.dim();
  Torsion12 t(d);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      t.set_pair(j, k, nijenhuis_torsion(n, VectorField::coordinate(d, j), VectorField::coordinate(d, k)));
    }
  }
  return t;
}

VectorField bracket_N(const Tensor11& n, const VectorField& x, const VectorField& y) {
  return lie_bracket(n.apply(x), y) + lie_bracket(x, n.apply(y)) - n.apply(lie_bracket(x, y));
}

Form koszul_bracket(const Bivector& pi, const Form& a, const Form& b) {
  if (pi.dim() != a.dim() || a.dim() != b.dim()) throw DomainError("koszul_bracket: chart dimensions differ");
  const int deg = a.degree() + b.degree() - 1;
  Form out(a.dim(), std::max(deg, 0));
  if (deg < 0 || deg > a.dim()) return out;
  for (const auto& [i, g] : a.terms()) {
    for (const auto& [j, h] : b.terms()) out += bracket_monomials(pi, g, i, h, j);
  }
  return out;
}

ScalarField poisson_bracket(const Bivector& pi, const ScalarField& f, const ScalarField& g) {
  const int d = pi.dim();
  std::vector<ScalarField> df(static_cast<std::size_t>(d)), dg(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    df[static_cast<std::size_t>(a)] = f.partial(a);
    dg[static_cast<std::size_t>(a)] = g.partial(a);
  }
  ScalarField out;
  for (int a = 0; a < d; ++a) {
    if (df[static_cast<std::size_t>(a)].is_zero()) continue;
    for (int b = 0; b < d; ++b) {
      if (pi(a, b).is_zero() || dg[static_cast<std::size_t>(b)].is_zero()) continue;
      out += pi(a, b) * df[static_cast<std::size_t>(a)] * dg[static_cast<std::size_t>(b)];
    }
  }
  return out;
}

}  // namespace pqn
