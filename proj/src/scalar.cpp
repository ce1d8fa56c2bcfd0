#include "pqn/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace pqn {

namespace detail {

struct Atom {
  int coord = -1;
  std::shared_ptr<const PolyData> sum;  // leading coefficient 1, >= 2 terms
};

struct Affine {
  Rational constant{0};
  std::vector<std::pair<int, Rational>> linear;  // sorted by index, nonzero

  bool empty() const { return constant == 0 && linear.empty(); }
};

struct Factor {
  Atom atom;
  int exponent = 1;
};

struct Monomial {
  std::vector<Factor> factors;  // sorted by atom, nonzero exponents
  Affine exp_arg;
};

struct Term {
  Monomial mono;
  Rational coeff{1};
};

using Terms = std::vector<Term>;

struct PolyData {
  Terms terms;  // sorted by monomial, nonzero coefficients
};

}  // namespace detail

namespace {

using detail::Affine;
using detail::Atom;
using detail::Factor;
using detail::Monomial;
using detail::PolyData;
using detail::Term;
using detail::Terms;

int cmp(const Rational& a, const Rational& b) { return a < b ? -1 : (b < a ? 1 : 0); }
int cmp(int a, int b) { return a < b ? -1 : (b < a ? 1 : 0); }
int cmp(const Terms& a, const Terms& b);

int cmp(const Atom& a, const Atom& b) {
  const bool ac = a.coord >= 0, bc = b.coord >= 0;
  if (ac && bc) return cmp(a.coord, b.coord);
  if (ac != bc) return ac ? -1 : 1;
  if (a.sum == b.sum) return 0;
  return cmp(a.sum->terms, b.sum->terms);
}

int cmp(const Affine& a, const Affine& b) {
  const std::size_t m = std::min(a.linear.size(), b.linear.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (int c = cmp(a.linear[k].first, b.linear[k].first)) return c;
    if (int c = cmp(a.linear[k].second, b.linear[k].second)) return c;
  }
  if (int c = cmp(static_cast<int>(a.linear.size()), static_cast<int>(b.linear.size()))) return c;
  return cmp(a.constant, b.constant);
}

int cmp(const Monomial& a, const Monomial& b) {
  const std::size_t m = std::min(a.factors.size(), b.factors.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (int c = cmp(a.factors[k].atom, b.factors[k].atom)) return c;
    if (int c = cmp(a.factors[k].exponent, b.factors[k].exponent)) return c;
  }
  if (int c = cmp(static_cast<int>(a.factors.size()), static_cast<int>(b.factors.size()))) return c;
  return cmp(a.exp_arg, b.exp_arg);
}

int cmp(const Terms& a, const Terms& b) {
  const std::size_t m = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (int c = cmp(a[k].mono, b[k].mono)) return c;
    if (int c = cmp(a[k].coeff, b[k].coeff)) return c;
  }
  return cmp(static_cast<int>(a.size()), static_cast<int>(b.size()));
}

Rational rpow(Rational r, int k) {
  if (k < 0) {
    if (r == 0) throw DomainError("division by zero in negative power");
    r = Rational(1) / r;
    k = -k;
  }
  Rational out(1);
  for (int i = 0; i < k; ++i) out *= r;
  return out;
}

void canonicalize(Terms& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return cmp(a.mono, b.mono) < 0; });
  Terms out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && cmp(out.back().mono, t.mono) == 0) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coeff == 0; });
  terms = std::move(out);
}

Affine add(const Affine& a, const Affine& b, Rational scale_b = Rational(1)) {
  Affine out;
  out.constant = a.constant + scale_b * b.constant;
  std::size_t i = 0, j = 0;
  while (i < a.linear.size() || j < b.linear.size()) {
    if (j == b.linear.size() || (i < a.linear.size() && a.linear[i].first < b.linear[j].first)) {
      out.linear.push_back(a.linear[i++]);
    } else if (i == a.linear.size() || b.linear[j].first < a.linear[i].first) {
      out.linear.emplace_back(b.linear[j].first, scale_b * b.linear[j].second);
      ++j;
    } else {
      Rational c = a.linear[i].second + scale_b * b.linear[j].second;
      if (c != 0) out.linear.emplace_back(a.linear[i].first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

Affine scaled(const Affine& a, Rational s) {
  Affine out;
  if (s == 0) return out;
  out.constant = a.constant * s;
  for (const auto& [i, c] : a.linear) out.linear.emplace_back(i, c * s);
  return out;
}

std::vector<Factor> merge_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  std::vector<Factor> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = (i == a.size()) ? 1 : (j == b.size()) ? -1 : cmp(a[i].atom, b[j].atom);
    if (c < 0) {
      out.push_back(a[i++]);
    } else if (c > 0) {
      out.push_back(b[j++]);
    } else {
      int e = a[i].exponent + b[j].exponent;
      if (e != 0) out.push_back({a[i].atom, e});
      ++i;
      ++j;
    }
  }
  return out;
}

Terms mul(const Terms& a, const Terms& b);
Terms pow_terms(const Terms& a, int k);

// Expands sum atoms that ended up with a positive exponent.
Terms settle(Term t) {
  std::vector<Factor> kept;
  std::vector<Factor> pending;
  for (auto& f : t.mono.factors) {
    if (f.atom.sum && f.exponent > 0) {
      pending.push_back(f);
    } else {
      kept.push_back(f);
    }
  }
  if (pending.empty()) return Terms{std::move(t)};
  t.mono.factors = std::move(kept);
  Terms out{std::move(t)};
  for (const auto& f : pending) out = mul(out, pow_terms(f.atom.sum->terms, f.exponent));
  return out;
}

Terms mul_term(const Term& a, const Term& b) {
  Term t;
  t.coeff = a.coeff * b.coeff;
  t.mono.factors = merge_factors(a.mono.factors, b.mono.factors);
  t.mono.exp_arg = add(a.mono.exp_arg, b.mono.exp_arg);
  return settle(std::move(t));
}

Terms mul(const Terms& a, const Terms& b) {
  Terms out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      Terms p = mul_term(x, y);
      std::move(p.begin(), p.end(), std::back_inserter(out));
    }
  }
  canonicalize(out);
  return out;
}

Terms constant_terms(Rational c) {
  if (c == 0) return {};
  Term t;
  t.coeff = c;
  return Terms{t};
}

Terms pow_terms(const Terms& a, int k) {
  if (k == 0) return constant_terms(1);
  if (k > 0) {
    Terms result = constant_terms(1);
    Terms base = a;
    while (k > 0) {
      if (k & 1) result = mul(result, base);
      k >>= 1;
      if (k > 0) base = mul(base, base);
    }
    return result;
  }
  if (a.empty()) throw DomainError("negative power of zero");
  if (a.size() == 1) {
    Term t;
    t.coeff = rpow(a[0].coeff, k);
    for (const auto& f : a[0].mono.factors) t.mono.factors.push_back({f.atom, f.exponent * k});
    t.mono.exp_arg = scaled(a[0].mono.exp_arg, Rational(k));
    Terms out = settle(std::move(t));
    canonicalize(out);
    return out;
  }
  const Rational lead = a.front().coeff;
  auto s = std::make_shared<PolyData>();
  s->terms = a;
  for (auto& t : s->terms) t.coeff /= lead;
  Term t;
  t.coeff = rpow(lead, k);
  Atom atom;
  atom.sum = std::move(s);
  t.mono.factors.push_back({atom, k});
  return Terms{t};
}

std::optional<Affine> as_affine(const Terms& terms) {
  Affine out;
  for (const auto& t : terms) {
    if (!t.mono.exp_arg.empty()) return std::nullopt;
    if (t.mono.factors.empty()) {
      out.constant += t.coeff;
    } else if (t.mono.factors.size() == 1 && t.mono.factors[0].atom.coord >= 0 &&
               t.mono.factors[0].exponent == 1) {
      out.linear.emplace_back(t.mono.factors[0].atom.coord, t.coeff);
    } else {
      return std::nullopt;
    }
  }
  std::sort(out.linear.begin(), out.linear.end());
  return out;
}

Terms terms_of_affine(const Affine& a) {
  Terms out = constant_terms(a.constant);
  for (const auto& [i, c] : a.linear) {
    Term t;
    t.coeff = c;
    Atom atom;
    atom.coord = i;
    t.mono.factors.push_back({atom, 1});
    out.push_back(t);
  }
  canonicalize(out);
  return out;
}

ScalarField make(Terms terms) {
  auto d = std::make_shared<PolyData>();
  d->terms = std::move(terms);
  return ScalarField(std::move(d));
}

const Terms& terms_of(const ScalarField& f) { return f.data().terms; }

Terms add_terms(const Terms& a, const Terms& b, Rational scale_b) {
  Terms out = a;
  out.reserve(a.size() + b.size());
  for (const auto& t : b) out.push_back({t.mono, t.coeff * scale_b});
  canonicalize(out);
  return out;
}

Terms partial_terms(const Terms& terms, int i);

Terms partial_atom(const Atom& a, int i) {
  if (a.coord >= 0) return a.coord == i ? constant_terms(1) : Terms{};
  return partial_terms(a.sum->terms, i);
}

Terms partial_terms(const Terms& terms, int i) {
  Terms out;
  for (const auto& t : terms) {
    for (const auto& [idx, c] : t.mono.exp_arg.linear) {
      if (idx == i) out.push_back({t.mono, t.coeff * c});
    }
    for (std::size_t k = 0; k < t.mono.factors.size(); ++k) {
      Terms inner = partial_atom(t.mono.factors[k].atom, i);
      if (inner.empty()) continue;
      Term rest = t;
      const int e = rest.mono.factors[k].exponent;
      rest.coeff *= e;
      if (e == 1) {
        rest.mono.factors.erase(rest.mono.factors.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        rest.mono.factors[k].exponent = e - 1;
      }
      Terms p = mul(settle(rest), inner);
      std::move(p.begin(), p.end(), std::back_inserter(out));
    }
  }
  canonicalize(out);
  return out;
}

std::string default_name(int i) { return "x" + std::to_string(i + 1); }

double eval_affine(const Affine& a, std::span<const double> x) {
  double v = boost::rational_cast<double>(a.constant);
  for (const auto& [i, c] : a.linear) {
    if (i >= static_cast<int>(x.size())) throw DomainError("point does not match chart");
    v += boost::rational_cast<double>(c) * x[static_cast<std::size_t>(i)];
  }
  return v;
}

double eval_terms(const Terms& terms, std::span<const double> x, double* scale);

double eval_atom(const Atom& a, std::span<const double> x) {
  if (a.coord >= 0) {
    if (a.coord >= static_cast<int>(x.size())) throw DomainError("point does not match chart");
    return x[static_cast<std::size_t>(a.coord)];
  }
  return eval_terms(a.sum->terms, x, nullptr);
}

std::string atom_text(const Atom& a) {
  return a.coord >= 0 ? default_name(a.coord) : to_string(make(a.sum->terms).to_expr(), default_name);
}

double eval_terms(const Terms& terms, std::span<const double> x, double* scale) {
  double total = 0.0;
  double abs_total = 0.0;
  for (const auto& t : terms) {
    double v = boost::rational_cast<double>(t.coeff);
    for (const auto& f : t.mono.factors) {
      const double base = eval_atom(f.atom, x);
      const double pw = std::pow(base, f.exponent);
      if (!std::isfinite(pw)) {
        throw EvaluationOverflow("(^ " + atom_text(f.atom) + " " + std::to_string(f.exponent) + ")");
      }
      v *= pw;
    }
    if (!t.mono.exp_arg.empty()) {
      const double e = std::exp(eval_affine(t.mono.exp_arg, x));
      if (!std::isfinite(e)) {
        throw EvaluationOverflow("(exp " + to_string(make(terms_of_affine(t.mono.exp_arg)).to_expr(), default_name) +
                                 ")");
      }
      v *= e;
    }
    if (!std::isfinite(v)) throw EvaluationOverflow("term product");
    total += v;
    abs_total += std::abs(v);
  }
  if (scale) *scale = abs_total;
  return total;
}

Expr atom_expr(const Atom& a) {
  if (a.coord >= 0) return Expr::coord(a.coord);
  return make(a.sum->terms).to_expr();
}

Expr affine_expr(const Affine& a) {
  std::vector<Expr> parts;
  for (const auto& [i, c] : a.linear) {
    if (c == 1) {
      parts.push_back(Expr::coord(i));
    } else {
      parts.push_back(Expr::product({Expr::constant(c), Expr::coord(i)}));
    }
  }
  if (a.constant != 0) parts.push_back(Expr::constant(a.constant));
  if (parts.size() == 1) return parts.front();
  return Expr::sum(std::move(parts));
}

Expr term_expr(const Term& t) {
  std::vector<Expr> parts;
  for (const auto& f : t.mono.factors) {
    if (f.exponent == 1) {
      parts.push_back(atom_expr(f.atom));
    } else {
      parts.push_back(Expr::power(atom_expr(f.atom), f.exponent));
    }
  }
  if (!t.mono.exp_arg.empty()) parts.push_back(Expr::exp(affine_expr(t.mono.exp_arg)));
  if (t.coeff != 1 || parts.empty()) parts.insert(parts.begin(), Expr::constant(t.coeff));
  if (parts.size() == 1) return parts.front();
  return Expr::product(std::move(parts));
}

int max_coord_terms(const Terms& terms) {
  int m = -1;
  for (const auto& t : terms) {
    for (const auto& f : t.mono.factors) {
      m = std::max(m, f.atom.coord >= 0 ? f.atom.coord : max_coord_terms(f.atom.sum->terms));
    }
    for (const auto& [i, c] : t.mono.exp_arg.linear) m = std::max(m, i);
  }
  return m;
}

}  // namespace

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ---- Chart ----------------------------------------------------------------

Chart::Chart(int particles) : n(particles) {
  if (n < 1) throw DomainError("chart needs at least one particle");
}

std::string Chart::name(int index) const {
  if (index < n) return "q" + std::to_string(index + 1);
  return "p" + std::to_string(index - n + 1);
}

std::optional<int> Chart::resolve(std::string_view token) const {
  if (token.size() < 2 || (token[0] != 'q' && token[0] != 'p')) return std::nullopt;
  int i = 0;
  auto [ptr, ec] = std::from_chars(token.data() + 1, token.data() + token.size(), i);
  if (ec != std::errc() || ptr != token.data() + token.size() || i < 1 || i > n) return std::nullopt;
  return token[0] == 'q' ? q(i) : p(i);
}

CoordinateNamer Chart::namer() const {
  return [c = *this](int i) { return c.name(i); };
}

CoordinateResolver Chart::resolver() const {
  return [c = *this](std::string_view t) { return c.resolve(t); };
}

CoordinateNamer univariate_namer() {
  return [](int i) { return i == 0 ? std::string("x") : default_name(i); };
}

CoordinateResolver univariate_resolver() {
  return [](std::string_view t) -> std::optional<int> {
    if (t == "x") return 0;
    return std::nullopt;
  };
}

// ---- Expr -----------------------------------------------------------------

Expr Expr::coord(int i) {
  Expr e;
  e.kind = Kind::Coordinate;
  e.coordinate = i;
  return e;
}

Expr Expr::constant(Rational v) {
  Expr e;
  e.kind = Kind::Constant;
  e.value = v;
  return e;
}

Expr Expr::sum(std::vector<Expr> terms) {
  Expr e;
  e.kind = Kind::Sum;
  e.children = std::move(terms);
  return e;
}

Expr Expr::product(std::vector<Expr> factors) {
  Expr e;
  e.kind = Kind::Product;
  e.children = std::move(factors);
  return e;
}

Expr Expr::power(Expr base, int k) {
  Expr e;
  e.kind = Kind::Power;
  e.exponent = k;
  e.children.push_back(std::move(base));
  return e;
}

Expr Expr::exp(Expr arg) {
  Expr e;
  e.kind = Kind::Exp;
  e.children.push_back(std::move(arg));
  return e;
}

double evaluate(const Expr& e, std::span<const double> x) {
  switch (e.kind) {
    case Expr::Kind::Coordinate:
      if (e.coordinate >= static_cast<int>(x.size())) throw DomainError("point does not match chart");
      return x[static_cast<std::size_t>(e.coordinate)];
    case Expr::Kind::Constant:
      return boost::rational_cast<double>(e.value);
    case Expr::Kind::Sum: {
      double s = 0.0;
      for (const auto& c : e.children) s += evaluate(c, x);
      return s;
    }
    case Expr::Kind::Product: {
      double s = 1.0;
      for (const auto& c : e.children) s *= evaluate(c, x);
      return s;
    }
    case Expr::Kind::Power:
      return std::pow(evaluate(e.children.at(0), x), e.exponent);
    case Expr::Kind::Exp:
      return std::exp(evaluate(e.children.at(0), x));
  }
  return 0.0;
}

std::string to_string(const Expr& e, const CoordinateNamer& names) {
  switch (e.kind) {
    case Expr::Kind::Coordinate:
      return names(e.coordinate);
    case Expr::Kind::Constant:
      return to_string(e.value);
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      std::string s = e.kind == Expr::Kind::Sum ? "(+" : "(*";
      for (const auto& c : e.children) s += " " + to_string(c, names);
      return s + ")";
    }
    case Expr::Kind::Power:
      return "(^ " + to_string(e.children.at(0), names) + " " + std::to_string(e.exponent) + ")";
    case Expr::Kind::Exp:
      return "(exp " + to_string(e.children.at(0), names) + ")";
  }
  return {};
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const CoordinateResolver& resolve) : text_(text), resolve_(resolve) {}

  Expr parse_all() {
    Expr e = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view token() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) fail("expected token");
    return text_.substr(start, pos_ - start);
  }

  static std::optional<Rational> rational(std::string_view t) {
    const auto slash = t.find('/');
    std::int64_t num = 0, den = 1;
    auto num_part = t.substr(0, slash);
    auto [p1, e1] = std::from_chars(num_part.data(), num_part.data() + num_part.size(), num);
    if (e1 != std::errc() || p1 != num_part.data() + num_part.size()) return std::nullopt;
    if (slash != std::string_view::npos) {
      auto den_part = t.substr(slash + 1);
      auto [p2, e2] = std::from_chars(den_part.data(), den_part.data() + den_part.size(), den);
      if (e2 != std::errc() || p2 != den_part.data() + den_part.size() || den <= 0) return std::nullopt;
    }
    return Rational(num, den);
  }

  Expr parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == ')') fail("unexpected ')'");
    if (text_[pos_] != '(') {
      auto t = token();
      if (auto r = rational(t)) return Expr::constant(*r);
      if (auto i = resolve_(t)) return Expr::coord(*i);
      fail("unknown token '" + std::string(t) + "'");
    }
    ++pos_;
    const std::string op(token());
    std::vector<Expr> args;
    std::optional<int> exponent;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) fail("missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (op == "^" && args.size() == 1) {
        auto t = token();
        auto r = rational(t);
        if (!r || r->denominator() != 1) fail("exponent must be an integer");
        exponent = static_cast<int>(r->numerator());
        continue;
      }
      args.push_back(parse());
    }
    if (op == "+" || op == "*") {
      if (args.empty()) fail("empty " + op);
      return op == "+" ? Expr::sum(std::move(args)) : Expr::product(std::move(args));
    }
    if (op == "^") {
      if (args.size() != 1 || !exponent) fail("'^' takes a base and an integer exponent");
      return Expr::power(std::move(args[0]), *exponent);
    }
    if (op == "exp") {
      if (args.size() != 1) fail("'exp' takes one argument");
      return Expr::exp(std::move(args[0]));
    }
    fail("unknown operator '" + op + "'");
  }

  std::string_view text_;
  const CoordinateResolver& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const CoordinateResolver& resolve) {
  return Parser(text, resolve).parse_all();
}

// ---- ScalarField ------------------------------------------------------------

ScalarField::ScalarField() : data_(std::make_shared<PolyData>()) {}

ScalarField::ScalarField(Rational c) : ScalarField(make(constant_terms(c))) {}

ScalarField ScalarField::coordinate(int i) {
  if (i < 0) throw DomainError("negative coordinate index");
  Term t;
  Atom a;
  a.coord = i;
  t.mono.factors.push_back({a, 1});
  return make(Terms{t});
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return make(add_terms(terms_of(a), terms_of(b), 1));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (b.is_zero()) return a;
  return make(add_terms(terms_of(a), terms_of(b), -1));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  if (a.is_zero() || b.is_zero()) return ScalarField();
  return make(mul(terms_of(a), terms_of(b)));
}

ScalarField ScalarField::operator-() const { return ScalarField() - *this; }

ScalarField pow(const ScalarField& a, int k) { return make(pow_terms(terms_of(a), k)); }

ScalarField exp(const ScalarField& a) {
  auto affine = as_affine(terms_of(a));
  if (!affine) throw UnsupportedFunction("exp argument must be affine in the coordinates");
  if (affine->empty()) return ScalarField(1);
  Term t;
  t.mono.exp_arg = *affine;
  return make(Terms{t});
}

ScalarField ScalarField::partial(int i) const { return make(partial_terms(data_->terms, i)); }

double ScalarField::evaluate(std::span<const double> x) const { return eval_terms(data_->terms, x, nullptr); }

std::pair<double, double> ScalarField::evaluate_with_scale(std::span<const double> x) const {
  double scale = 0.0;
  const double v = eval_terms(data_->terms, x, &scale);
  return {v, scale};
}

ScalarField ScalarField::substitute(std::span<const ScalarField> images) const {
  auto image = [&](int i) -> const ScalarField& {
    if (i >= static_cast<int>(images.size())) throw DomainError("substitution misses coordinate " + default_name(i));
    return images[static_cast<std::size_t>(i)];
  };
  ScalarField out;
  for (const auto& t : data_->terms) {
    ScalarField v(t.coeff);
    for (const auto& f : t.mono.factors) {
      const ScalarField base = f.atom.coord >= 0 ? image(f.atom.coord) : make(f.atom.sum->terms).substitute(images);
      v *= pow(base, f.exponent);
    }
    if (!t.mono.exp_arg.empty()) {
      ScalarField arg(t.mono.exp_arg.constant);
      for (const auto& [i, c] : t.mono.exp_arg.linear) arg += ScalarField(c) * image(i);
      v *= exp(arg);
    }
    out += v;
  }
  return out;
}

std::optional<ScalarField> ScalarField::antiderivative(int i) const {
  Terms out;
  for (const auto& t : data_->terms) {
    const auto& f = t.mono.factors;
    const auto& e = t.mono.exp_arg;
    if (e.empty()) {
      if (f.empty()) {
        out.push_back(t);
        Atom a;
        a.coord = i;
        out.back().mono.factors.push_back({a, 1});
        continue;
      }
      if (f.size() == 1 && f[0].atom.coord == i && f[0].exponent != -1) {
        Term p = t;
        p.mono.factors[0].exponent += 1;
        p.coeff /= Rational(f[0].exponent + 1);
        if (p.mono.factors[0].exponent == 0) p.mono.factors.clear();
        out.push_back(p);
        continue;
      }
      return std::nullopt;
    }
    if (!f.empty() || e.linear.size() != 1 || e.linear[0].first != i) return std::nullopt;
    Term p = t;
    p.coeff /= e.linear[0].second;
    out.push_back(p);
  }
  canonicalize(out);
  return make(std::move(out));
}

bool ScalarField::is_zero() const { return data_->terms.empty(); }

std::optional<Rational> ScalarField::as_constant() const {
  if (data_->terms.empty()) return Rational(0);
  if (data_->terms.size() == 1 && data_->terms[0].mono.factors.empty() && data_->terms[0].mono.exp_arg.empty()) {
    return data_->terms[0].coeff;
  }
  return std::nullopt;
}

std::size_t ScalarField::term_count() const { return data_->terms.size(); }

int ScalarField::max_coordinate() const { return max_coord_terms(data_->terms); }

Expr ScalarField::to_expr() const {
  const auto& terms = data_->terms;
  if (terms.empty()) return Expr::constant(0);
  if (terms.size() == 1) return term_expr(terms[0]);
  std::vector<Expr> parts;
  parts.reserve(terms.size());
  for (const auto& t : terms) parts.push_back(term_expr(t));
  return Expr::sum(std::move(parts));
}

std::string ScalarField::to_string(const CoordinateNamer& names) const { return pqn::to_string(to_expr(), names); }

int compare(const ScalarField& a, const ScalarField& b) {
  if (a.data_ == b.data_) return 0;
  return cmp(a.data_->terms, b.data_->terms);
}

ScalarField normalize(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Coordinate:
      return ScalarField::coordinate(e.coordinate);
    case Expr::Kind::Constant:
      return ScalarField(e.value);
    case Expr::Kind::Sum: {
      ScalarField s;
      for (const auto& c : e.children) s += normalize(c);
      return s;
    }
    case Expr::Kind::Product: {
      ScalarField s(1);
      for (const auto& c : e.children) s *= normalize(c);
      return s;
    }
    case Expr::Kind::Power:
      return pow(normalize(e.children.at(0)), e.exponent);
    case Expr::Kind::Exp:
      return exp(normalize(e.children.at(0)));
  }
  return {};
}

ScalarField parse_scalar(std::string_view text, const Chart& chart) {
  return normalize(parse_expr(text, chart.resolver()));
}

// ---- zero testing -------------------------------------------------------------

void ZeroTestConfig::validate() const {
  if (sample_count < 1) throw DomainError("sample_count must be >= 1");
  if (!(tolerance > 0)) throw DomainError("tolerance must be > 0");
  if (!(separation >= 0)) throw DomainError("separation must be >= 0");
  if (!(half_width >= 0)) throw DomainError("half_width must be >= 0");
}

PointSampler::PointSampler(const Chart& chart, const ZeroTestConfig& cfg)
    : chart_(chart), cfg_(cfg), rng_(cfg.seed), coord_(-cfg.half_width, cfg.half_width) {
  cfg_.validate();
}

Point PointSampler::next() {
  const long budget = 100L * cfg_.sample_count;
  for (;;) {
    Point x(static_cast<std::size_t>(chart_.dim()));
    for (auto& v : x) v = coord_(rng_);
    bool ok = true;
    if (cfg_.separation > 0) {
      for (int i = 0; i < chart_.n && ok; ++i) {
        for (int j = i + 1; j < chart_.n && ok; ++j) {
          if (std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]) < cfg_.separation) ok = false;
        }
      }
    }
    if (ok) return x;
    if (++rejected_ > budget) {
      throw DegenerateDomain("sampling rejected more than " + std::to_string(budget) +
                             " points; separation guard cannot be met in the sampling box");
    }
  }
}

std::vector<Point> sample_points(const Chart& chart, const ZeroTestConfig& cfg) {
  PointSampler sampler(chart, cfg);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(cfg.sample_count));
  for (int k = 0; k < cfg.sample_count; ++k) pts.push_back(sampler.next());
  return pts;
}

ZeroVerdict is_zero(const ScalarField& f, std::span<const Point> points, double tolerance) {
  ZeroVerdict v;
  if (f.is_zero()) return v;
  v.mode = ZeroMode::Sampled;
  double worst = -1.0;
  for (const auto& x : points) {
    auto [value, scale] = f.evaluate_with_scale(x);
    const double rel = std::abs(value) / (1.0 + scale);
    v.max_abs = std::max(v.max_abs, std::abs(value));
    if (rel > worst) {
      worst = rel;
      v.witness = x;
    }
    ++v.samples;
  }
  v.residual = std::max(worst, 0.0);
  v.zero = v.residual <= tolerance;
  return v;
}

ZeroVerdict is_zero(const ScalarField& f, const Chart& chart, const ZeroTestConfig& cfg) {
  cfg.validate();
  if (f.is_zero()) return {};
  if (f.max_coordinate() >= chart.dim()) throw DomainError("scalar field does not live on this chart");
  const auto pts = sample_points(chart, cfg);
  return is_zero(f, pts, cfg.tolerance);
}

}  // namespace pqn
