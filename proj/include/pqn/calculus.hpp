#pragma once

#include "pqn/exterior.hpp"

namespace pqn {

/// Exterior derivative. Throws DomainError on top-degree forms.
Form cartan_d(const Form& a);

/// d_N = i_N o d - d o i_N. On functions this is N^* df.
Form d_N(const Tensor11& n, const Form& a);

/// Nijenhuis torsion components T^i_{jk} = T_N(d_j, d_k)^i, antisymmetric in (j, k).
class Torsion12 {
 public:
  explicit Torsion12(int dim);

  int dim() const { return dim_; }
  const ScalarField& operator()(int i, int j, int k) const { return t_[idx(i, j, k)]; }
  void set_pair(int j, int k, const VectorField& value);  // also fills (k, j)

  // T(X, Y)^i = T^i_{jk} X^j Y^k.
  VectorField operator()(const VectorField& x, const VectorField& y) const;
  bool is_structurally_zero() const;

 private:
  std::size_t idx(int i, int j, int k) const { return static_cast<std::size_t>((i * dim_ + j) * dim_ + k); }
  int dim_;
  std::vector<ScalarField> t_;
};

// T_N(X, Y) = [NX, NY] - N([NX, Y] + [X, NY] - N[X, Y]) on arbitrary fields.
VectorField nijenhuis_torsion(const Tensor11& n, const VectorField& x, const VectorField& y);
Torsion12 nijenhuis_torsion(const Tensor11& n);

// [X, Y]_N = [NX, Y] + [X, NY] - N[X, Y].
VectorField bracket_N(const Tensor11& n, const VectorField& x, const VectorField& y);

/// Koszul bracket of forms of any degree; the result has degree p + q - 1
/// (the zero 0-form when that is negative).
Form koszul_bracket(const Bivector& pi, const Form& a, const Form& b);

// {f, g} = pi(df, dg) = <dg, pi_sharp df>.
ScalarField poisson_bracket(const Bivector& pi, const ScalarField& f, const ScalarField& g);

}  // namespace pqn
