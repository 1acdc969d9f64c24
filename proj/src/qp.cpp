#include "adaptci/qp.hpp"

#include "adaptci/errors.hpp"

#include <cmath>
#include <limits>

namespace adaptci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// State of the dual method: with G = L L' and N the active normals,
// L^{-1} N = Q [R; 0] and J = L^{-T} Q.
struct ActiveSet {
  Eigen::MatrixXd J;
  Eigen::MatrixXd R;
  std::vector<int> rows; // constraint index per active slot
  Eigen::VectorXd u;     // multipliers per active slot
  int q = 0;
  double r_norm = 1.0;

  // Rotate d = J'n so that only its first q+1 entries are nonzero, then append
  // the new column to R. Returns false when n is (numerically) dependent.
  bool add(Eigen::VectorXd& d, int row, double mult)
  {
    const int n = static_cast<int>(J.rows());
    for (int j = n - 1; j > q; --j) {
      const double a = d(j - 1);
      const double b = d(j);
      const double h = std::hypot(a, b);
      if (h == 0.0)
        continue;
      const double c = a / h;
      const double s = b / h;
      d(j - 1) = h;
      d(j) = 0.0;
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, j - 1);
        const double t2 = J(k, j);
        J(k, j - 1) = c * t1 + s * t2;
        J(k, j) = -s * t1 + c * t2;
      }
    }
    if (std::abs(d(q)) <= std::numeric_limits<double>::epsilon() * r_norm * 1e2)
      return false;
    R.col(q).head(q + 1) = d.head(q + 1);
    r_norm = std::max(r_norm, std::abs(d(q)));
    rows[q] = row;
    u(q) = mult;
    ++q;
    return true;
  }

  // Remove active slot l and restore the triangular shape of R with Givens rotations.
  void drop(int l)
  {
    const int n = static_cast<int>(J.rows());
    for (int j = l; j < q - 1; ++j) {
      R.col(j) = R.col(j + 1);
      rows[j] = rows[j + 1];
      u(j) = u(j + 1);
    }
    R.col(q - 1).setZero();
    --q;
    for (int j = l; j < q; ++j) {
      const double a = R(j, j);
      const double b = R(j + 1, j);
      const double h = std::hypot(a, b);
      if (h == 0.0)
        continue;
      const double c = a / h;
      const double s = b / h;
      R(j, j) = h;
      R(j + 1, j) = 0.0;
      for (int k = j + 1; k < q; ++k) {
        const double t1 = R(j, k);
        const double t2 = R(j + 1, k);
        R(j, k) = c * t1 + s * t2;
        R(j + 1, k) = -s * t1 + c * t2;
      }
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, j);
        const double t2 = J(k, j + 1);
        J(k, j) = c * t1 + s * t2;
        J(k, j + 1) = -s * t1 + c * t2;
      }
    }
  }

  bool contains(int row) const
  {
    for (int i = 0; i < q; ++i)
      if (rows[i] == row)
        return true;
    return false;
  }
};

} // namespace

QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& lb, int max_iterations)
{
  const int n = static_cast<int>(G.rows());
  const int m = static_cast<int>(A.rows());
  if (G.cols() != n || g.size() != n || (m > 0 && A.cols() != n) || lb.size() != m)
    throw ValidationError("solve_qp: inconsistent problem dimensions");

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw NumericalError("solve_qp: Hessian is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  ActiveSet as;
  as.J = L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
  as.R = Eigen::MatrixXd::Zero(n, n);
  as.rows.assign(n, -1);
  as.u = Eigen::VectorXd::Zero(n);

  // unconstrained minimum
  Eigen::VectorXd x = -llt.solve(g);
  double f = 0.5 * g.dot(x);

  Eigen::VectorXd row_norm(m);
  for (int i = 0; i < m; ++i)
    row_norm(i) = A.row(i).norm();

  auto slack = [&](int i) { return A.row(i).dot(x) - lb(i); };
  auto violation_tol = [&](int i) {
    return 1e-12 * (1.0 + std::abs(lb(i)) + row_norm(i) * x.cwiseAbs().maxCoeff());
  };

  QpResult res;
  int iter = 0;
  while (true) {
    // most violated constraint not already active
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      const double s = slack(i);
      if (s < -violation_tol(i) && s < worst && !as.contains(i)) {
        worst = s;
        p = i;
      }
    }
    if (p < 0)
      break;

    double u_new = 0.0;
    const Eigen::VectorXd np = A.row(p).transpose();
    while (true) {
      if (++iter > max_iterations)
        throw NonConvergence("solve_qp: iteration cap reached");
      Eigen::VectorXd d = as.J.transpose() * np;
      const int q = as.q;
      const Eigen::VectorXd z = as.J.rightCols(n - q) * d.tail(n - q);
      Eigen::VectorXd r;
      if (q > 0)
        r = as.R.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));

      // partial (dual) step length
      double t1 = kInf;
      int l = -1;
      for (int k = 0; k < q; ++k) {
        if (r(k) > 0.0) {
          const double ratio = as.u(k) / r(k);
          if (ratio < t1) {
            t1 = ratio;
            l = k;
          }
        }
      }
      // full (primal) step length
      double t2 = kInf;
      const double zn = z.dot(np);
      if (z.norm() > 1e-14 * (1.0 + np.norm()) && zn > 0.0)
        t2 = -slack(p) / zn;

      const double t = std::min(t1, t2);
      if (t == kInf)
        throw NumericalError("solve_qp: constraints are infeasible");

      if (t2 == kInf) {
        // no primal progress possible: move the multipliers and drop a constraint
        if (q > 0)
          as.u.head(q) -= t * r;
        u_new += t;
        as.drop(l);
        continue;
      }

      x += t * z;
      f += t * zn * (0.5 * t + u_new);
      if (q > 0)
        as.u.head(q) -= t * r;
      u_new += t;

      if (t == t2) {
        if (!as.add(d, p, u_new))
          throw NumericalError("solve_qp: degenerate (linearly dependent) active constraint");
        break;
      }
      as.drop(l);
      if (slack(p) >= -violation_tol(p))
        break; // became satisfied during the partial step
    }
  }

  res.x = x;
  res.objective = 0.5 * x.dot(G * x) + g.dot(x);
  res.multipliers = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < as.q; ++k) {
    res.active.push_back(as.rows[k]);
    res.multipliers(as.rows[k]) = as.u(k);
  }
  res.iterations = iter;
  (void)f;
  return res;
}

} // namespace adaptci
