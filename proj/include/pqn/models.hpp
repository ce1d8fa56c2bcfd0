#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqn/structures.hpp"

namespace pqn {

/// V_ij as a function of one variable x (coordinate 0 of a univariate field),
/// evaluated at x = q_i - q_j. Pair indices are 1-based with i < j.
struct PairPotential {
  int i = 1;
  int j = 2;
  ScalarField v;
  std::optional<ScalarField> primitive;  // filled by antiderivative when absent

  PairPotential(int i_, int j_, ScalarField v_, std::optional<ScalarField> primitive_ = std::nullopt);
};

struct ModelExpectation {
  StructureClass cls = StructureClass::PN;
  // true: all {H_j, H_k} vanish for j, k <= involutive_up_to;
  // false: some pair with j, k <= involutive_up_to does not; nullopt: no claim.
  std::optional<bool> involutive;
  int involutive_up_to = 0;
  std::optional<Form> phi;  // closed form of the deformation 3-form
};

struct ModelBundle {
  std::string name;
  Chart chart;
  Bivector pi;
  Tensor11 base_n;             // PN tensor that is deformed
  std::optional<Form> omega;   // deformation 2-form
  Tensor11 n;                  // the structure's tensor, from its explicit formula
  std::optional<Form> theta;   // potential with d theta = omega, when known
  ModelExpectation expected;
};

Bivector canonical_bivector(const Chart& chart);  // sum_i d/dp_i ^ d/dq_i
Tensor11 canonical_tensor(const Chart& chart);    // N_c = sum_i p_i (dq_i (x) dq_i + dp_i (x) dp_i)
Form canonical_symplectic(const Chart& chart);    // omega_c = sum_i dp_i ^ dq_i
Form omega_1(const Chart& chart);                 // sum_i p_i dp_i ^ dq_i
Form hamiltonian_operator(const Chart& chart);    // Omega_c = omega_c - omega_1

Form vij_omega(const Chart& chart, const std::vector<PairPotential>& v);
Tensor11 vij_tensor(const Chart& chart, const std::vector<PairPotential>& v);
std::optional<Form> vij_theta(const Chart& chart, const std::vector<PairPotential>& v);
// d_N Omega + 1/2 [Omega, Omega] from the two closed-form sums over pairs.
Form vij_phi(const Chart& chart, const std::vector<PairPotential>& v);

std::vector<PairPotential> toda_potentials(int n, const std::vector<Rational>& f);
std::vector<PairPotential> calogero_potentials(int n);

// Omega_DO: open Toda pair 2-form with nearest-neighbour constants f_1..f_{n-1}.
Form open_toda_omega(const Chart& chart, const std::vector<Rational>& f);
// Omega_c + Omega_DO.
Form omega_hat(const Chart& chart, const std::vector<Rational>& f);

ModelBundle canonical_pn(int n);
ModelBundle vij_model(int n, std::vector<PairPotential> v);
ModelBundle closed_toda(int n, std::vector<Rational> f = {});  // f defaults to all ones
ModelBundle open_toda(int n, std::vector<Rational> f = {});    // n - 1 constants
ModelBundle calogero(int n);

/// Literal n = 2 matrices and forms; V is a function of (q_1, q_2).
struct TwoParticleFixture {
  Chart chart{2};
  ScalarField v;
  Tensor11 pi_sharp{4};
  Tensor11 n{4};
  Tensor11 n_hat{4};
  Form omega{4, 2};
  Form d_n_omega{4, 3};
  Form omega_omega{4, 3};
};

TwoParticleFixture two_particle_fixture(std::optional<ScalarField> v = std::nullopt);

const std::vector<std::string>& known_models();

// CLI vocabulary: canonical, closed-toda, open-toda, calogero, vij.
ModelBundle make_model(const std::string& name, int n, const std::vector<Rational>& f,
                       const std::vector<PairPotential>& potentials = {});

}  // namespace pqn
