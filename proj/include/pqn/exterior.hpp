#pragma once

#include <map>
#include <span>
#include <vector>

#include "pqn/scalar.hpp"

namespace pqn {

/// Differential p-form stored sparsely: strictly increasing index tuples
/// mapped to nonzero coefficients.
class Form {
 public:
  using Index = std::vector<int>;
  using Terms = std::map<Index, ScalarField>;

  Form(int dim, int degree);

  static Form function(int dim, const ScalarField& f);
  static Form differential(int dim, int i);  // dx_i
  // Coefficient times dx_{i_1} ^ ... ^ dx_{i_p}; indices in any order.
  static Form monomial(int dim, Index indices, const ScalarField& coeff);
  // Sum_i coeffs[i] dx_i.
  static Form one_form(std::span<const ScalarField> coeffs);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Terms& terms() const { return terms_; }
  ScalarField coefficient(const Index& sorted) const;
  bool is_zero() const { return terms_.empty(); }

  // Adds to the coefficient of a sorted index tuple.
  void accumulate(const Index& sorted, const ScalarField& c);

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  Form operator-() const;
  friend Form operator*(const ScalarField& f, const Form& a);
  friend Form operator*(const Form& a, const ScalarField& f) { return f * a; }

  friend bool operator==(const Form& a, const Form& b);

 private:
  int dim_;
  int degree_;
  Terms terms_;
};

class VectorField {
 public:
  explicit VectorField(int dim);
  explicit VectorField(std::vector<ScalarField> components);

  static VectorField coordinate(int dim, int i);  // d/dx_i

  int dim() const { return static_cast<int>(c_.size()); }
  const ScalarField& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  ScalarField& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<ScalarField>& components() const { return c_; }
  bool is_zero() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(const ScalarField& f, const VectorField& v);
  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  std::vector<ScalarField> c_;
};

/// (1,1) tensor; entry (i, j) is N^i_j, so (N X)^i = N^i_j X^j and column j
/// is N(d/dx_j).
class Tensor11 {
 public:
  explicit Tensor11(int dim);

  static Tensor11 identity(int dim);
  static Tensor11 from_rows(const std::vector<std::vector<ScalarField>>& rows);

  int dim() const { return dim_; }
  const ScalarField& operator()(int i, int j) const { return e_[idx(i, j)]; }
  ScalarField& operator()(int i, int j) { return e_[idx(i, j)]; }

  VectorField apply(const VectorField& x) const;
  ScalarField trace() const;

  Tensor11& operator+=(const Tensor11& o);
  friend Tensor11 operator+(Tensor11 a, const Tensor11& b) { return a += b; }
  friend Tensor11 operator-(const Tensor11& a, const Tensor11& b);
  friend Tensor11 operator*(const Tensor11& a, const Tensor11& b);  // composition
  friend Tensor11 operator*(const ScalarField& f, const Tensor11& a);
  friend bool operator==(const Tensor11&, const Tensor11&) = default;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * dim_ + j); }
  int dim_;
  std::vector<ScalarField> e_;
};

/// Bivector pi with components pi^{ij} = -pi^{ji}; pi(a, b) = pi^{ij} a_i b_j.
class Bivector {
 public:
  explicit Bivector(int dim);

  // Throws DomainError unless the matrix is structurally antisymmetric.
  static Bivector from_matrix(const std::vector<std::vector<ScalarField>>& m);

  int dim() const { return dim_; }
  const ScalarField& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * dim_ + j)]; }
  // Sets pi^{ij} and pi^{ji} = -value.
  void set(int i, int j, const ScalarField& value);

  friend bool operator==(const Bivector&, const Bivector&) = default;

 private:
  int dim_;
  std::vector<ScalarField> e_;
};

Form wedge(const Form& a, const Form& b);

// i_X a; throws DomainError for 0-forms.
Form interior(const VectorField& x, const Form& a);

// The derivation extension of N^*; zero on functions.
Form i_N(const Tensor11& n, const Form& a);

// <a, X> for a 1-form a.
ScalarField pairing(const Form& a, const VectorField& x);

// a(X_1, ..., X_p).
ScalarField evaluate_form(const Form& a, std::span<const VectorField> xs);

VectorField pi_sharp(const Bivector& pi, const Form& a);
Form omega_flat(const Form& w, const VectorField& x);

// Matrices in the column-vector convention: column j is the image of the
// j-th basis element, so entry (i, j) of sharp_matrix is pi^{ji} and entry
// (i, j) of flat_matrix is Omega_{ji}.
Tensor11 sharp_matrix(const Bivector& pi);
Tensor11 flat_matrix(const Form& w);

VectorField lie_bracket(const VectorField& x, const VectorField& y);

ScalarField lie_derivative(const VectorField& x, const ScalarField& f);
Form lie_derivative(const VectorField& x, const Form& a);
Tensor11 lie_derivative(const VectorField& x, const Tensor11& n);

}  // namespace pqn
