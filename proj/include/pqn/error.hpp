#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pqn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value while evaluating a ScalarField.
class EvaluationOverflow : public Error {
 public:
  EvaluationOverflow(const std::string& node)
      : Error("evaluation overflow at node " + node), node_(node) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

// The sampler could not find enough admissible points.
class DegenerateDomain : public Error {
 public:
  using Error::Error;
};

// Operation called outside its domain (wrong degree, mismatched charts, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A function that leaves the supported node set (e.g. exp of a non-affine argument).
class UnsupportedFunction : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A deformation hypothesis does not hold; carries the sample point that shows it.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, std::vector<double> witness, double residual)
      : Error(what), witness_(std::move(witness)), residual_(residual) {}
  const std::vector<double>& witness() const { return witness_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> witness_;
  double residual_;
};

}  // namespace pqn
