#pragma once

#include <Eigen/Dense>

#include <vector>

namespace adaptci {

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers; // one per constraint row, zero when inactive
  std::vector<int> active;     // constraint rows active at the solution
  double objective = 0.0;      // 1/2 x'Gx + g'x
  int iterations = 0;
};

//! Dense strictly convex QP by the Goldfarb-Idnani dual active-set method:
//!
//!   min 1/2 x'Gx + g'x   s.t.   A x >= lb   (row-wise)
//!
//! G must be symmetric positive definite. Throws NumericalError when the
//! constraints are infeasible and NonConvergence past the iteration cap.
QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& lb, int max_iterations = 100000);

} // namespace adaptci
