#pragma once

#include "adaptci/design.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/modulus.hpp"

#include <vector>

namespace adaptci {

struct OracleOptions {
  double rho = 0.0;      // proximal weight; 0 picks 1e-2 * mean(1 / sigma^2)
  double tol = 1e-12;    // stop when the proximal step moves less than tol * max(1, b)
  int max_outer = 20000; // proximal iterations before NonConvergence
};

struct OracleResult {
  double delta = 0.0;
  // values at the design points; the origin carries f_from(0) = 0, f_to(0) = b
  std::vector<double> f_from;
  std::vector<double> f_to;
  int outer_iterations = 0;
};

//! Brute-force inverse modulus: minimizes sum(((f_to - f_from)(x_i) / sigma_i)^2)
//! over raw function values on the design points and the origin, subject to the
//! exact finite-set class constraints and f_to(0) - f_from(0) = b. The problem is
//! a singular convex QP, solved by proximal-point steps over a dual active-set
//! solver. Intended for small n; duplicate design points are merged.
OracleResult modulus_oracle_solve(const OrderedPair& pair, const Design& design, double b,
                                  const OracleOptions& options = {});
double modulus_oracle(const OrderedPair& pair, const Design& design, double b,
                      const OracleOptions& options = {});

//! Same QP with one side replaced by the class of functions that are merely
//! nondecreasing along V (no Hoelder bound, constant off V comparisons).
double modulus_oracle_monotone_only(const HolderClass& cls, const Design& design, double b,
                                    MonotoneOnlyDirection direction =
                                        MonotoneOnlyDirection::holder_to_monotone,
                                    const OracleOptions& options = {});

} // namespace adaptci
