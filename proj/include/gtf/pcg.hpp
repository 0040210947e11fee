#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace gtf {

struct PcgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradient for SPD operators. `apply` computes
/// A x, `precond_diag` is the Jacobi diagonal (entries clamped away from
/// zero internally). Solves in place starting from x.
inline PcgResult pcg(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                     std::span<const double> precond_diag, std::span<const double> rhs,
                     std::vector<double>& x, double rel_tol, int max_iterations) {
  const size_t n = rhs.size();
  std::vector<double> r(n), z(n), p(n), ap(n);
  apply(x, ap);
  double rhs_norm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    r[i] = rhs[i] - ap[i];
    rhs_norm2 += rhs[i] * rhs[i];
  }
  const double stop2 = rel_tol * rel_tol * std::max(rhs_norm2, 1e-300);
  auto apply_precond = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (size_t i = 0; i < n; ++i) {
      const double d = std::abs(precond_diag[i]) > 1e-300 ? precond_diag[i] : 1.0;
      out[i] = in[i] / d;
    }
  };
  apply_precond(r, z);
  p = z;
  double rz = 0.0, rr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    rz += r[i] * z[i];
    rr += r[i] * r[i];
  }
  PcgResult result;
  while (rr > stop2 && result.iterations < max_iterations) {
    apply(p, ap);
    double pap = 0.0;
    for (size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;  // numerically semidefinite direction
    const double alpha = rz / pap;
    rr = 0.0;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rr += r[i] * r[i];
    }
    apply_precond(r, z);
    double rz_new = 0.0;
    for (size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++result.iterations;
  }
  result.relative_residual = std::sqrt(rr / std::max(rhs_norm2, 1e-300));
  result.converged = rr <= stop2;
  return result;
}

}  // namespace gtf
