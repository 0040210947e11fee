#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace gtf {

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // one eigenvector per column
};

/// Closed-form eigenpairs of the chain Laplacian (Neumann boundary):
/// xi_i = 4 sin^2(pi (i-1) / (2n)), cosine eigenvectors, constant first.
EigenPairs chain_neumann_eigenpairs(int n);

/// Closed-form eigenpairs of D D^T for the chain (Dirichlet boundary):
/// sine eigenvectors u_ij = sqrt(2/n) sin(pi i j / n), i,j = 1..n-1.
EigenPairs chain_dirichlet_eigenpairs(int n);

/// Kronecker-sum eigenpairs of the 2d grid Laplacian: values are pairwise
/// sums of the 1d Neumann values, vectors are Kronecker products.
EigenPairs grid_eigenpairs(int rows, int cols);

/// mu = sqrt(n) * max entry magnitude over unit-norm columns.
double incoherence_constant(const Eigen::MatrixXd& vectors, int n);

struct GridDdtFamilies {
  Eigen::MatrixXd vectors;  // constructed eigenvectors of the grid D D^T
  Eigen::VectorXd values;
  double max_eigen_residual = 0.0;
  double mu = 0.0;  // incoherence wrt sqrt(n), n = number of grid nodes
};

/// The appendix's explicit eigenvector families of the ell x ell grid
/// D D^T (the v_i (x) u_i stacks, e (x) u_i pairs and normalized mixed
/// (i,j) pairs); n-1 vectors covering the whole nonzero spectrum.
GridDdtFamilies grid_ddt_eigenvector_families(int ell);

/// Fused-lasso atoms g_i = P_{1^perp} h_i of (D^(1))^dagger for a chain
/// of length n; realized covering radius of {+-g_i} by the constructive
/// centers (stride-spaced atoms per sign) using j balls.
double covering_radius_fused_lasso(int n, int j);
double covering_bound(int n, int j);
/// max over pairs i > l of ||g_i - g_l|| - sqrt(i - l)  (should be <= 0).
double atom_distance_bound_violation(int n);

/// Least-squares slope of log M(n) on log n for the univariate operator
/// D^(k+1) (M = max pseudoinverse column norm). Expected k + 1/2.
double pinv_norm_scaling(int k, const std::vector<int>& n_list);

struct RateSweepResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<std::pair<int, double>> mse_by_n;
};

/// Empirical fused-lasso (k=0) rate: piecewise-constant truth with fixed
/// total variation on chains, sigma = 1, oracle-tuned lambda per instance
/// (30-point geometric grid), slope of log mean-MSE on log n.
RateSweepResult rate_sweep(const std::vector<int>& n_list, int reps, std::uint64_t seed,
                           int lambda_grid_points = 30);

struct TheoryReport {
  std::string check;
  nlohmann::ordered_json params;
  double computed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct TheoryOptions {
  std::string only_check;  // empty runs the full suite
  int covering_n = 100;
  int atom_n = 50;
  std::vector<int> chain_sizes = {2, 16, 64};
  std::vector<int> grid_sizes = {2, 4, 8};
  std::vector<int> scaling_sizes = {32, 64, 128, 256};
  std::vector<int> rate_sizes = {64, 128, 256, 512, 1024, 2048};
  int rate_reps = 20;
  std::uint64_t seed = 0;
};

/// Full executable verification suite; every report carries the computed
/// quantity, the analytic bound/value and a pass flag. The Erdos-Renyi
/// lambda_min entry is report-only (it always passes).
std::vector<TheoryReport> run_theory_suite(const TheoryOptions& options = {});

}  // namespace gtf
