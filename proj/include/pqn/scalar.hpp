#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "pqn/error.hpp"

// Boost 1.74 defines rational == integer in terms of the reversed template,
// which C++20 rewriting turns into unbounded recursion. Exact-match overloads
// take precedence over both templates.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == rational<std::int64_t>(b); }
inline bool operator==(const rational<std::int64_t>& a, long b) { return a == rational<std::int64_t>(b); }
inline bool operator==(int b, const rational<std::int64_t>& a) { return a == rational<std::int64_t>(b); }
inline bool operator==(long b, const rational<std::int64_t>& a) { return a == rational<std::int64_t>(b); }
}  // namespace boost

namespace pqn {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);

using Point = std::vector<double>;

using CoordinateNamer = std::function<std::string(int)>;
using CoordinateResolver = std::function<std::optional<int>(std::string_view)>;

/// Coordinate chart (q_1..q_n, p_1..p_n) on R^{2n}. Indices are 0-based
/// internally; names and reports are 1-based.
struct Chart {
  int n = 1;

  explicit Chart(int particles);

  int dim() const { return 2 * n; }
  int q(int i) const { return i - 1; }      // 1-based particle index
  int p(int i) const { return n + i - 1; }  // 1-based particle index

  std::string name(int index) const;
  std::optional<int> resolve(std::string_view token) const;
  CoordinateNamer namer() const;
  CoordinateResolver resolver() const;

  bool operator==(const Chart&) const = default;
};

/// Single formal variable `x`, used for pair potentials V(x).
CoordinateNamer univariate_namer();
CoordinateResolver univariate_resolver();

/// Raw (unnormalized) expression tree. Parsing produces one; normalize()
/// turns it into a canonical ScalarField.
struct Expr {
  enum class Kind { Coordinate, Constant, Sum, Product, Power, Exp };

  Kind kind = Kind::Constant;
  int coordinate = -1;
  Rational value{0};
  int exponent = 1;
  std::vector<Expr> children;

  static Expr coord(int i);
  static Expr constant(Rational v);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, int k);
  static Expr exp(Expr arg);

  bool operator==(const Expr&) const = default;
};

double evaluate(const Expr& e, std::span<const double> x);
std::string to_string(const Expr& e, const CoordinateNamer& names);

/// Prefix grammar: `(+ a b ...)`, `(* a b ...)`, `(^ a k)`, `(exp a)`,
/// coordinate tokens, and rational literals such as `-3/2`.
Expr parse_expr(std::string_view text, const CoordinateResolver& resolve);

namespace detail {
struct PolyData;
}

/// Immutable scalar field in canonical form: a sum of terms, each a rational
/// coefficient times integer powers of atoms (coordinates, or sums that only
/// occur with negative exponents) times exp of an affine form.
class ScalarField {
 public:
  ScalarField();  // zero
  ScalarField(Rational c);
  ScalarField(std::int64_t c) : ScalarField(Rational(c)) {}
  ScalarField(int c) : ScalarField(Rational(c)) {}

  static ScalarField coordinate(int i);
  static ScalarField constant(Rational c) { return ScalarField(c); }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  ScalarField operator-() const;
  ScalarField& operator+=(const ScalarField& o) { return *this = *this + o; }
  ScalarField& operator-=(const ScalarField& o) { return *this = *this - o; }
  ScalarField& operator*=(const ScalarField& o) { return *this = *this * o; }

  friend ScalarField pow(const ScalarField& a, int k);
  // Throws UnsupportedFunction unless the argument is affine in the coordinates.
  friend ScalarField exp(const ScalarField& a);

  ScalarField partial(int i) const;
  double evaluate(std::span<const double> x) const;
  // Value together with the sum of absolute term values at x.
  std::pair<double, double> evaluate_with_scale(std::span<const double> x) const;

  ScalarField substitute(std::span<const ScalarField> images) const;

  // Termwise primitive in coordinate i for terms c x_i^k (k != -1) and
  // c exp(a x_i + b); nullopt for anything else.
  std::optional<ScalarField> antiderivative(int i) const;

  bool is_zero() const;
  std::optional<Rational> as_constant() const;
  std::size_t term_count() const;
  // Largest coordinate index referenced, or -1 for constants.
  int max_coordinate() const;

  Expr to_expr() const;
  std::string to_string(const CoordinateNamer& names) const;

  // Total order on canonical forms; structural equality.
  friend int compare(const ScalarField& a, const ScalarField& b);
  friend bool operator==(const ScalarField& a, const ScalarField& b) { return compare(a, b) == 0; }
  friend bool operator<(const ScalarField& a, const ScalarField& b) { return compare(a, b) < 0; }

  const detail::PolyData& data() const { return *data_; }
  explicit ScalarField(std::shared_ptr<const detail::PolyData> d) : data_(std::move(d)) {}

 private:
  std::shared_ptr<const detail::PolyData> data_;
};

ScalarField normalize(const Expr& e);
ScalarField parse_scalar(std::string_view text, const Chart& chart);

struct ZeroTestConfig {
  int sample_count = 50;
  double half_width = 2.0;
  double separation = 1e-2;  // minimum |q_i - q_j|; 0 disables the guard
  double tolerance = 1e-9;
  std::uint64_t seed = 20240521;

  void validate() const;
};

enum class ZeroMode { Symbolic, Sampled };

struct ZeroVerdict {
  bool zero = true;
  ZeroMode mode = ZeroMode::Symbolic;
  std::optional<Point> witness;  // worst sample point
  double residual = 0.0;         // max |f| / (1 + sum |terms|)
  double max_abs = 0.0;          // max |f|
  int samples = 0;
};

/// Deterministic stream of sample points in [-w, w]^{2n}, rejecting points
/// closer than the separation to the q_i = q_j collision locus.
class PointSampler {
 public:
  PointSampler(const Chart& chart, const ZeroTestConfig& cfg);
  Point next();

 private:
  Chart chart_;
  ZeroTestConfig cfg_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> coord_;
  int rejected_ = 0;
};

/// Shared sample set for a chart and config.
std::vector<Point> sample_points(const Chart& chart, const ZeroTestConfig& cfg);

ZeroVerdict is_zero(const ScalarField& f, const Chart& chart, const ZeroTestConfig& cfg);
ZeroVerdict is_zero(const ScalarField& f, std::span<const Point> points, double tolerance);

}  // namespace pqn
