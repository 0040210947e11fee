#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gtf/difference_op.hpp"
#include "gtf/graph.hpp"

namespace gtf {

struct SolverOptions {
  double rho = 0.0;  // augmented Lagrangian parameter; 0 selects max(lambda, 1e-3)
  int max_iterations = 5000;
  double tolerance = 1e-8;  // residual stopping scale, multiplied by sqrt(n)
  double cg_tolerance = 1e-10;
  bool adaptive_rho = true;
  std::uint64_t seed = 0;
};

struct GtfFit {
  std::vector<double> beta;
  double lambda = 0.0;
  int k = 0;
  /// Dual vector in the row space of Delta^(k+1); beta = y - Delta^T dual
  /// and ||dual||_inf <= lambda at convergence. Empty when the solver does
  /// not produce one.
  std::vector<double> dual;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ill_conditioned = false;
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> primal_residuals;
  std::vector<double> dual_residuals;
  std::string method;
};

/// Warm-start state for repeated ADMM solves (lambda paths). Also caches
/// the probed diag(L^{2q}) so it is computed once per (graph, k).
struct AdmmWarmState {
  std::vector<double> beta, z, u;
  double rho = 0.0;
  std::vector<double> lap_pow_diag;
  int k = -1;
};

std::vector<double> soft_threshold(std::span<const double> x, double t);

/// ADMM for the GTF problem  min 1/2||y-beta||^2 + lambda ||Delta^(k+1) beta||_1,
/// splitting z = L^q beta; the z-update is graph TV denoising for even k
/// and soft-thresholding for odd k. Unconverged results are returned with
/// converged=false, never thrown.
GtfFit gtf_admm(std::span<const double> y, GraphPtr g, int k, double lambda,
                const SolverOptions& opts = {}, AdmmWarmState* warm = nullptr);

/// Projected Newton on the box-constrained dual
///   min ||y - Delta^T v||^2  s.t. ||v||_inf <= lambda,
/// with reduced-Hessian CG steps and Armijo backtracking on the projected
/// direction. Recommended for k <= 1; ill-conditioning is flagged.
GtfFit gtf_projected_newton(std::span<const double> y, GraphPtr g, int k, double lambda,
                            const SolverOptions& opts = {},
                            const std::vector<double>* warm_dual = nullptr);

/// Graph Laplacian smoothing beta = (I + lambda L^{k+1})^{-1} y via PCG.
std::vector<double> laplacian_smooth(std::span<const double> y, const Graph& g, int k,
                                     double lambda, double cg_tolerance = 1e-12);

/// Sparse GTF: min 1/2||y-beta||^2 + lambda1 ||Delta^(k+1) beta||_1
///             + lambda2 ||beta||_1, two-block ADMM with (z; w) = (L^q beta; beta).
/// Near-zero components are zeroed exactly (threshold 1e-10 relative).
GtfFit sparse_gtf(std::span<const double> y, GraphPtr g, int k, double lambda1, double lambda2,
                  const SolverOptions& opts = {});

enum class Method { Auto, Admm, Newton, MaxFlow };
Method method_from_string(const std::string& name);
std::string method_name(Method m);

/// Dispatcher following the computation table: k=0 -> direct parametric
/// max-flow; k=1 -> projected Newton; even k>=2 -> ADMM with max-flow
/// prox; odd k>=3 -> ADMM with soft-thresholding.
GtfFit solve(std::span<const double> y, GraphPtr g, int k, double lambda,
             Method method = Method::Auto, const SolverOptions& opts = {},
             AdmmWarmState* warm = nullptr);

/// Diagonal-quadratic loss 1/2 beta^T diag(a) beta - c^T beta used by the
/// transduction module (observed-only squared loss plus epsilon ridge).
struct QuadraticLoss {
  std::vector<double> a_diag;
  std::vector<double> c;
};

/// ADMM for min quadratic(beta) + lambda ||Delta^(k+1) beta||_1 with the
/// loss above; beta-update stays a diagonal-plus-L^{2q} SPD system.
GtfFit admm_quadratic(const QuadraticLoss& loss, GraphPtr g, int k, double lambda,
                      const SolverOptions& opts = {}, AdmmWarmState* warm = nullptr);

/// diag(L^{2q}) by probing the factored operator with basis vectors.
std::vector<double> laplacian_power_diagonal(const Graph& g, int q);

double gtf_objective(std::span<const double> y, const DifferenceOperator& op, double lambda,
                     std::span<const double> beta);

}  // namespace gtf
