#pragma once

// Generators and independent oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pqn/models.hpp"

namespace pqn::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Rational small_rational(Rng& rng) {
  int num = uniform_int(rng, -4, 4);
  if (num == 0) num = 1;
  return Rational(num, uniform_int(rng, 1, 3));
}

// Sum of a few monomials, sometimes times an exponential of a coordinate difference.
inline ScalarField random_scalar(const Chart& chart, Rng& rng, bool allow_exp = true) {
  ScalarField f(0);
  const int terms = uniform_int(rng, 1, 3);
  for (int t = 0; t < terms; ++t) {
    ScalarField m(small_rational(rng));
    const int factors = uniform_int(rng, 0, 2);
    for (int k = 0; k < factors; ++k) m = m * ScalarField::coordinate(uniform_int(rng, 0, chart.dim() - 1));
    f += m;
  }
  if (allow_exp && uniform_int(rng, 0, 3) == 0) {
    const int a = uniform_int(rng, 0, chart.dim() - 1);
    const int b = uniform_int(rng, 0, chart.dim() - 1);
    f = f * exp(ScalarField::coordinate(a) - ScalarField(Rational(1, 2)) * ScalarField::coordinate(b));
  }
  return f;
}

inline Form random_form(const Chart& chart, int degree, Rng& rng, bool allow_exp = true) {
  const int d = chart.dim();
  if (degree == 0) return Form::function(d, random_scalar(chart, rng, allow_exp));
  Form out(d, degree);
  const int terms = uniform_int(rng, 1, 3);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> idx;
    for (int k = 0; k < degree; ++k) idx.push_back(uniform_int(rng, 0, d - 1));
    out += Form::monomial(d, idx, random_scalar(chart, rng, allow_exp));
  }
  return out;
}

inline VectorField random_vector(const Chart& chart, Rng& rng) {
  VectorField v(chart.dim());
  for (int i = 0; i < chart.dim(); ++i)
    if (uniform_int(rng, 0, 1)) v[i] = random_scalar(chart, rng);
  return v;
}

inline Tensor11 random_tensor(const Chart& chart, Rng& rng) {
  Tensor11 t(chart.dim());
  for (int i = 0; i < chart.dim(); ++i)
    for (int j = 0; j < chart.dim(); ++j)
      if (uniform_int(rng, 0, 2) == 0) t(i, j) = random_scalar(chart, rng, false);
  return t;
}

inline Expr random_expr(Rng& rng, int dim, int depth) {
  if (depth == 0 || uniform_int(rng, 0, 3) == 0) {
    if (uniform_int(rng, 0, 1)) return Expr::coord(uniform_int(rng, 0, dim - 1));
    return Expr::constant(small_rational(rng));
  }
  switch (uniform_int(rng, 0, 3)) {
    case 0:
      return Expr::sum({random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1)});
    case 1:
      return Expr::product({random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1)});
    case 2:
      return Expr::power(random_expr(rng, dim, depth - 1), uniform_int(rng, 0, 3));
    default: {
      // exp of an affine argument only
      Expr arg = Expr::sum({Expr::product({Expr::constant(small_rational(rng)), Expr::coord(uniform_int(rng, 0, dim - 1))}),
                            Expr::constant(small_rational(rng))});
      return Expr::exp(arg);
    }
  }
}

inline Point random_point(const Chart& chart, Rng& rng, double w = 1.5) {
  Point x(static_cast<std::size_t>(chart.dim()));
  for (auto& v : x) v = uniform_real(rng, -w, w);
  return x;
}

// ---- oracles ---------------------------------------------------------------------

// Central difference of f along coordinate i.
inline double finite_difference(const ScalarField& f, const Point& x, int i, double h = 1e-5) {
  Point a = x, b = x;
  a[static_cast<std::size_t>(i)] += h;
  b[static_cast<std::size_t>(i)] -= h;
  return (f.evaluate(a) - f.evaluate(b)) / (2 * h);
}

inline double det(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  double d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double k = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= k * m[c][j];
    }
  }
  return d;
}

// a(X_1, ..., X_p) at x by the determinant formula, without interior products.
inline double eval_form_det(const Form& a, const std::vector<VectorField>& xs, const Point& x) {
  double total = 0;
  for (const auto& [idx, c] : a.terms()) {
    std::vector<std::vector<double>> m(idx.size(), std::vector<double>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t k = 0; k < xs.size(); ++k) m[r][k] = xs[k][idx[r]].evaluate(x);
    total += c.evaluate(x) * det(m);
  }
  return total;
}

// Symbolic a(X_1, ..., X_p) as a scalar: sum over terms of coeff * det of component fields.
inline ScalarField eval_form_symbolic(const Form& a, const std::vector<VectorField>& xs) {
  const std::size_t p = xs.size();
  ScalarField total(0);
  for (const auto& [idx, c] : a.terms()) {
    std::vector<int> perm(p);
    for (std::size_t k = 0; k < p; ++k) perm[k] = static_cast<int>(k);
    ScalarField d(0);
    do {
      int inversions = 0;
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
          if (perm[i] > perm[j]) ++inversions;
      ScalarField prod(inversions % 2 ? -1 : 1);
      for (std::size_t r = 0; r < p; ++r) prod = prod * xs[static_cast<std::size_t>(perm[r])][idx[r]];
      d += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    total += c * d;
  }
  return total;
}

inline VectorField n_bracket_oracle(const Tensor11& n, const VectorField& x, const VectorField& y) {
  return lie_bracket(n.apply(x), y) + lie_bracket(x, n.apply(y)) - n.apply(lie_bracket(x, y));
}

// (d_N a)(X_0, ..., X_q) from the invariant formula, on coordinate fields.
inline ScalarField d_n_invariant(const Tensor11& n, const Form& a, const std::vector<VectorField>& xs) {
  const std::size_t q1 = xs.size();
  auto without = [&](std::vector<std::size_t> skip) {
    std::vector<VectorField> out;
    for (std::size_t k = 0; k < q1; ++k)
      if (std::find(skip.begin(), skip.end(), k) == skip.end()) out.push_back(xs[k]);
    return out;
  };
  ScalarField total(0);
  for (std::size_t j = 0; j < q1; ++j) {
    const ScalarField inner = a.degree() == 0 ? a.coefficient({}) : eval_form_symbolic(a, without({j}));
    const ScalarField l = lie_derivative(n.apply(xs[j]), inner);
    total += j % 2 ? -l : l;
  }
  for (std::size_t i = 0; i < q1; ++i) {
    for (std::size_t j = i + 1; j < q1; ++j) {
      std::vector<VectorField> args{n_bracket_oracle(n, xs[i], xs[j])};
      for (const auto& v : without({i, j})) args.push_back(v);
      const ScalarField term = eval_form_symbolic(a, args);
      total += (i + j) % 2 ? -term : term;
    }
  }
  return total;
}

// [a, b]_pi for 1-forms straight from the Lie-derivative formula.
inline Form koszul_one_forms_oracle(const Bivector& pi, const Form& a, const Form& b) {
  const Form pairing_form = Form::function(a.dim(), pairing(b, pi_sharp(pi, a)));
  return lie_derivative(pi_sharp(pi, a), b) - lie_derivative(pi_sharp(pi, b), a) - cartan_d(pairing_form);
}

// Largest |f| over the points.
inline double max_abs(const ScalarField& f, const std::vector<Point>& pts) {
  double m = 0;
  for (const auto& x : pts) m = std::max(m, std::abs(f.evaluate(x)));
  return m;
}

inline double max_abs(const Form& a, const std::vector<Point>& pts) {
  double m = 0;
  for (const auto& [idx, c] : a.terms()) m = std::max(m, max_abs(c, pts));
  return m;
}

inline bool structurally_equal(const Form& a, const Form& b) { return (a - b).is_zero(); }

inline bool structurally_equal(const Tensor11& a, const Tensor11& b) {
  const Tensor11 d = a - b;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (!d(i, j).is_zero()) return false;
  return true;
}

inline ScalarField q(const Chart& c, int i) { return ScalarField::coordinate(c.q(i)); }
inline ScalarField p(const Chart& c, int i) { return ScalarField::coordinate(c.p(i)); }

}  // namespace pqn::testing
