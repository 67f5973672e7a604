#pragma once

#include "mrfsi/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace mrfsi {

struct GmresResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Unrestarted GMRES with zero initial guess and a matrix-free operator.
/// Modified Gram-Schmidt Arnoldi, Givens rotations.
inline GmresResult gmres(const std::function<Vector(const Vector&)>& apply, const Vector& b, double rtol,
                         int max_iter) {
  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = Vector::Zero(n);
  const double beta = b.norm();
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  std::vector<Vector> V;
  V.push_back(b / beta);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
  Vector cs = Vector::Zero(max_iter), sn = Vector::Zero(max_iter);
  Vector g = Vector::Zero(max_iter + 1);
  g[0] = beta;
  int j = 0;
  double resid = beta;
  for (; j < max_iter; ++j) {
    Vector w = apply(V[j]);
    for (int i = 0; i <= j; ++i) {
      H(i, j) = w.dot(V[i]);
      w -= H(i, j) * V[i];
    }
    H(j + 1, j) = w.norm();
    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
      H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
      H(i, j) = t;
    }
    const double r = std::hypot(H(j, j), H(j + 1, j));
    cs[j] = r == 0.0 ? 1.0 : H(j, j) / r;
    sn[j] = r == 0.0 ? 0.0 : H(j + 1, j) / r;
    const double hj1 = H(j + 1, j);
    H(j, j) = r;
    H(j + 1, j) = 0.0;
    g[j + 1] = -sn[j] * g[j];
    g[j] = cs[j] * g[j];
    resid = std::abs(g[j + 1]);
    const bool breakdown = hj1 <= 1e-14 * r;
    if (!breakdown) V.push_back(w / hj1);
    if (resid <= rtol * beta || breakdown) {
      ++j;
      break;
    }
  }
  res.iterations = j;
  if (j > 0) {
    const Vector y =
        H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) res.x += y[i] * V[i];
  }
  res.relative_residual = resid / beta;
  res.converged = resid <= rtol * beta;
  return res;
}

}  // namespace mrfsi
