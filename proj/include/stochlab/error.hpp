#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stochlab {

/// Invalid experiment or object configuration (bad sizes, bad parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two objects that must share a time grid, spatial grid or dimension do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An integrand reads randomness that is not yet revealed at its node.
class PredictabilityError : public std::logic_error {
 public:
  PredictabilityError(std::size_t node, long revealed)
      : std::logic_error("integrand at node " + std::to_string(node) +
                         " reads randomness revealed at node " + std::to_string(revealed)),
        node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Explicit time step violates the stability restriction of a solver.
class CflError : public std::invalid_argument {
 public:
  CflError(double number, double limit)
      : std::invalid_argument("CFL number " + std::to_string(number) + " exceeds " +
                              std::to_string(limit)),
        number_(number) {}
  double number() const noexcept { return number_; }

 private:
  double number_;
};

/// Non-finite value produced during time stepping.
class NumericalBlowup : public std::runtime_error {
 public:
  explicit NumericalBlowup(std::size_t step)
      : std::runtime_error("non-finite value at time step " + std::to_string(step)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Solution left the kinetic window [xi_min, xi_max].
class RangeEscape : public std::runtime_error {
 public:
  RangeEscape(std::size_t step, double value)
      : std::runtime_error("solution value " + std::to_string(value) +
                           " left the kinetic window at step " + std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace stochlab
