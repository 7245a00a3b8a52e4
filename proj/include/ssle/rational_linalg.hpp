#pragma once

#include <optional>
#include <vector>

#include "ssle/scalar.hpp"

namespace ssle {

using RMatrix = std::vector<std::vector<Rational>>;
using RVector = std::vector<Rational>;

struct LinearSolution {
  bool consistent = false;
  RVector particular;          // one solution (free variables set to 0)
  std::vector<RVector> kernel;  // basis of the homogeneous solution space
};

/// Exact Gauss-Jordan solve of A x = b (A is rows x cols, any shape).
LinearSolution solve_linear(RMatrix a, RVector b);

/// Basis of { x : A x = 0 }.
std::vector<RVector> nullspace(const RMatrix& a);

/// P/Q with deg P <= dp, deg Q <= dq; coefficients ascending, Q normalised so its
/// highest nonzero coefficient is 1.
struct RationalFunction {
  RVector p;
  RVector q;
  Rational operator()(const Rational& x) const;
  std::string to_string(const std::string& var) const;
};

/// Lowest total-degree rational function through all points, or nullopt if none
/// with deg P + deg Q <= max_total interpolates every sample.
std::optional<RationalFunction> fit_rational_function(const RVector& xs, const RVector& ys, int max_total = 6);

}  // namespace ssle
