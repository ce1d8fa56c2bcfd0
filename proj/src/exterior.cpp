#include "pqn/exterior.hpp"

#include <algorithm>

#include "pqn/calculus.hpp"

namespace pqn {

namespace {

// Sorts indices in place; returns the permutation sign, or 0 on a repeat.
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

void require_same_dim(int a, int b, const char* what) {
  if (a != b) throw DomainError(std::string(what) + ": chart dimensions differ");
}

}  // namespace

// ---- Form -----------------------------------------------------------------

Form::Form(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0) throw DomainError("invalid form shape");
}

Form Form::function(int dim, const ScalarField& f) {
  Form out(dim, 0);
  out.accumulate({}, f);
  return out;
}

Form Form::differential(int dim, int i) { return monomial(dim, {i}, ScalarField(1)); }

Form Form::monomial(int dim, Index indices, const ScalarField& coeff) {
  for (int i : indices) {
    if (i < 0 || i >= dim) throw DomainError("form index out of range");
  }
  Form out(dim, static_cast<int>(indices.size()));
  const int sign = sort_with_sign(indices);
  if (sign != 0) out.accumulate(indices, sign > 0 ? coeff : -coeff);
  return out;
}

Form Form::one_form(std::span<const ScalarField> coeffs) {
  Form out(static_cast<int>(coeffs.size()), 1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) out.accumulate({static_cast<int>(i)}, coeffs[i]);
  return out;
}

ScalarField Form::coefficient(const Index& sorted) const {
  auto it = terms_.find(sorted);
  return it == terms_.end() ? ScalarField() : it->second;
}

void Form::accumulate(const Index& sorted, const ScalarField& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(sorted, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Form& Form::operator+=(const Form& o) {
  require_same_dim(dim_, o.dim_, "form sum");
  if (o.is_zero()) return *this;
  if (is_zero()) degree_ = o.degree_;
  if (degree_ != o.degree_) throw DomainError("cannot add forms of different degree");
  for (const auto& [k, c] : o.terms_) accumulate(k, c);
  return *this;
}

Form& Form::operator-=(const Form& o) { return *this += -o; }

Form Form::operator-() const {
  Form out(dim_, degree_);
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
  return out;
}

Form operator*(const ScalarField& f, const Form& a) {
  Form out(a.dim_, a.degree_);
  for (const auto& [k, c] : a.terms_) out.accumulate(k, f * c);
  return out;
}

bool operator==(const Form& a, const Form& b) {
  if (a.dim_ != b.dim_) return false;
  if (a.is_zero() && b.is_zero()) return true;
  return a.degree_ == b.degree_ && a.terms_ == b.terms_;
}

// ---- VectorField ------------------------------------------------------------

VectorField::VectorField(int dim) : c_(static_cast<std::size_t>(dim)) {}

VectorField::VectorField(std::vector<ScalarField> components) : c_(std::move(components)) {}

VectorField VectorField::coordinate(int dim, int i) {
  VectorField v(dim);
  v[i] = ScalarField(1);
  return v;
}

bool VectorField::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const ScalarField& f) { return f.is_zero(); });
}

VectorField& VectorField::operator+=(const VectorField& o) {
  require_same_dim(dim(), o.dim(), "vector sum");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  require_same_dim(dim(), o.dim(), "vector difference");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

VectorField operator*(const ScalarField& f, const VectorField& v) {
  VectorField out(v.dim());
  for (int i = 0; i < v.dim(); ++i) out[i] = f * v[i];
  return out;
}

// ---- Tensor11 -----------------------------------------------------------------

Tensor11::Tensor11(int dim) : dim_(dim), e_(static_cast<std::size_t>(dim * dim)) {}

Tensor11 Tensor11::identity(int dim) {
  Tensor11 t(dim);
  for (int i = 0; i < dim; ++i) t(i, i) = ScalarField(1);
  return t;
}

Tensor11 Tensor11::from_rows(const std::vector<std::vector<ScalarField>>& rows) {
  const int d = static_cast<int>(rows.size());
  Tensor11 t(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d) throw DomainError("tensor must be square");
    for (int j = 0; j < d; ++j) t(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return t;
}

VectorField Tensor11::apply(const VectorField& x) const {
  require_same_dim(dim_, x.dim(), "tensor application");
  VectorField out(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      if (!(*this)(i, j).is_zero() && !x[j].is_zero()) out[i] += (*this)(i, j) * x[j];
    }
  }
  return out;
}

ScalarField Tensor11::trace() const {
  ScalarField t;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

Tensor11& Tensor11::operator+=(const Tensor11& o) {
  require_same_dim(dim_, o.dim_, "tensor sum");
  for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
  return *this;
}

Tensor11 operator-(const Tensor11& a, const Tensor11& b) {
  require_same_dim(a.dim_, b.dim_, "tensor difference");
  Tensor11 out(a.dim_);
  for (std::size_t k = 0; k < a.e_.size(); ++k) out.e_[k] = a.e_[k] - b.e_[k];
  return out;
}

Tensor11 operator*(const Tensor11& a, const Tensor11& b) {
  require_same_dim(a.dim_, b.dim_, "tensor composition");
  const int d = a.dim_;
  Tensor11 out(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      if (a(i, k).is_zero()) continue;
      for (int j = 0; j < d; ++j) {
        if (!b(k, j).is_zero()) out(i, j) += a(i, k) * b(k, j);
      }
    }
  }
  return out;
}

Tensor11 operator*(const ScalarField& f, const Tensor11& a) {
  Tensor11 out(a.dim_);
  for (std::size_t k = 0; k < a.e_.size(); ++k) out.e_[k] = f * a.e_[k];
  return out;
}

// ---- Bivector -----------------------------------------------------------------

Bivector::Bivector(int dim) : dim_(dim), e_(static_cast<std::size_t>(dim * dim)) {}

Bivector Bivector::from_matrix(const std::vector<std::vector<ScalarField>>& m) {
  const int d = static_cast<int>(m.size());
  Bivector b(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != d) throw DomainError("bivector must be square");
    for (int j = 0; j < d; ++j) {
      const auto& a = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (a + m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] != ScalarField()) {
        throw DomainError("bivector matrix is not antisymmetric");
      }
      b.e_[static_cast<std::size_t>(i * d + j)] = a;
    }
  }
  return b;
}

void Bivector::set(int i, int j, const ScalarField& value) {
  if (i == j) {
    if (!value.is_zero()) throw DomainError("bivector diagonal must vanish");
    return;
  }
  e_[static_cast<std::size_t>(i * dim_ + j)] = value;
  e_[static_cast<std::size_t>(j * dim_ + i)] = -value;
}

// ---- algebra ------------------------------------------------------------------

Form wedge(const Form& a, const Form& b) {
  require_same_dim(a.dim(), b.dim(), "wedge");
  const int deg = a.degree() + b.degree();
  if (deg > a.dim()) return Form(a.dim(), 0);
  Form out(a.dim(), deg);
  for (const auto& [i, f] : a.terms()) {
    for (const auto& [j, g] : b.terms()) {
      Form::Index idx = i;
      idx.insert(idx.end(), j.begin(), j.end());
      const int sign = sort_with_sign(idx);
      if (sign == 0) continue;
      const ScalarField c = f * g;
      out.accumulate(idx, sign > 0 ? c : -c);
    }
  }
  return out;
}

Form interior(const VectorField& x, const Form& a) {
  require_same_dim(x.dim(), a.dim(), "interior product");
  if (a.degree() == 0) throw DomainError("interior product of a 0-form");
  Form out(a.dim(), a.degree() - 1);
  for (const auto& [idx, c] : a.terms()) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& xk = x[idx[k]];
      if (xk.is_zero()) continue;
      Form::Index rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      const ScalarField v = xk * c;
      out.accumulate(rest, k % 2 == 0 ? v : -v);
    }
  }
  return out;
}

Form i_N(const Tensor11& n, const Form& a) {
  require_same_dim(n.dim(), a.dim(), "i_N");
  Form out(a.dim(), a.degree());
  if (a.degree() == 0) return out;
  for (const auto& [idx, c] : a.terms()) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      for (int j = 0; j < n.dim(); ++j) {
        const auto& nij = n(idx[k], j);
        if (nij.is_zero()) continue;
        Form::Index repl = idx;
        repl[k] = j;
        const int sign = sort_with_sign(repl);
        if (sign == 0) continue;
        const ScalarField v = nij * c;
        out.accumulate(repl, sign > 0 ? v : -v);
      }
    }
  }
  return out;
}

ScalarField pairing(const Form& a, const VectorField& x) {
  if (a.degree() != 1 && !a.is_zero()) throw DomainError("pairing needs a 1-form");
  require_same_dim(a.dim(), x.dim(), "pairing");
  ScalarField out;
  for (const auto& [idx, c] : a.terms()) {
    if (!x[idx[0]].is_zero()) out += c * x[idx[0]];
  }
  return out;
}

ScalarField evaluate_form(const Form& a, std::span<const VectorField> xs) {
  if (static_cast<int>(xs.size()) != a.degree()) throw DomainError("form evaluated on wrong number of vectors");
  Form cur = a;
  for (const auto& x : xs) cur = interior(x, cur);
  return cur.coefficient({});
}

VectorField pi_sharp(const Bivector& pi, const Form& a) {
  require_same_dim(pi.dim(), a.dim(), "pi_sharp");
  if (a.degree() != 1 && !a.is_zero()) throw DomainError("pi_sharp needs a 1-form");
  VectorField out(a.dim());
  for (const auto& [idx, c] : a.terms()) {
    const int i = idx[0];
    for (int b = 0; b < pi.dim(); ++b) {
      if (!pi(i, b).is_zero()) out[b] += pi(i, b) * c;
    }
  }
  return out;
}

Form omega_flat(const Form& w, const VectorField& x) {
  if (w.degree() != 2 && !w.is_zero()) throw DomainError("omega_flat needs a 2-form");
  if (w.is_zero()) return Form(w.dim(), 1);
  return interior(x, w);
}

Tensor11 sharp_matrix(const Bivector& pi) {
  Tensor11 m(pi.dim());
  for (int i = 0; i < pi.dim(); ++i) {
    for (int j = 0; j < pi.dim(); ++j) m(i, j) = pi(j, i);
  }
  return m;
}

Tensor11 flat_matrix(const Form& w) {
  if (w.degree() != 2 && !w.is_zero()) throw DomainError("flat_matrix needs a 2-form");
  Tensor11 m(w.dim());
  for (const auto& [idx, c] : w.terms()) {
    // Omega_{ab} = c for (a, b) = idx; entry (i, j) = Omega_{ji}.
    m(idx[1], idx[0]) += c;
    m(idx[0], idx[1]) -= c;
  }
  return m;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same_dim(x.dim(), y.dim(), "Lie bracket");
  const int d = x.dim();
  VectorField out(d);
  for (int j = 0; j < d; ++j) {
    const bool xj = !x[j].is_zero(), yj = !y[j].is_zero();
    if (!xj && !yj) continue;
    for (int i = 0; i < d; ++i) {
      if (xj && !y[i].is_zero()) out[i] += x[j] * y[i].partial(j);
      if (yj && !x[i].is_zero()) out[i] -= y[j] * x[i].partial(j);
    }
  }
  return out;
}

ScalarField lie_derivative(const VectorField& x, const ScalarField& f) {
  ScalarField out;
  for (int j = 0; j < x.dim(); ++j) {
    if (!x[j].is_zero()) out += x[j] * f.partial(j);
  }
  return out;
}

Form lie_derivative(const VectorField& x, const Form& a) {
  require_same_dim(x.dim(), a.dim(), "Lie derivative");
  if (a.degree() == 0) return Form::function(a.dim(), lie_derivative(x, a.coefficient({})));
  Form out = a.degree() < a.dim() ? interior(x, cartan_d(a)) : Form(a.dim(), a.degree());
  out += cartan_d(interior(x, a));
  return out;
}

Tensor11 lie_derivative(const VectorField& x, const Tensor11& n) {
  const int d = n.dim();
  Tensor11 out(d);
  for (int j = 0; j < d; ++j) {
    const VectorField ej = VectorField::coordinate(d, j);
    const VectorField col = lie_bracket(x, n.apply(ej)) - n.apply(lie_bracket(x, ej));
    for (int i = 0; i < d; ++i) out(i, j) = col[i];
  }
  return out;
}

}  // namespace pqn
