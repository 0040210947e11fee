#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gtf/graph.hpp"
#include "gtf/solvers.hpp"

namespace gtf {

/// Support of Delta^(k+1) beta-hat above the relative active-set threshold
/// 1e-8 * max(1, ||Delta beta||_inf). Row indices are edges for even k,
/// nodes for odd k.
std::vector<int> active_set(const GtfFit& fit, const Graph& g);

/// Unbiased degrees-of-freedom estimate: max{|A|,1} for odd k, number of
/// connected components of G_{-A} for even k; disconnected graphs are
/// handled per component and summed.
int estimate_df(const GtfFit& fit, const Graph& g);

/// Relative distance of beta-hat from the fitted null-space span
/// ({component indicators} + (L^dagger)^{k/2} indicators of G_{-A} for even
/// k, (L^dagger)^{(k+1)/2} e_a over the active nodes for odd k). Dense
/// path only (TooLarge above max_nodes).
double nullspace_residual(const GtfFit& fit, const Graph& g, int max_nodes = 500);

/// Smallest lambda at which the fit provably collapses to the penalty null
/// space: ||(Delta^T)^dagger (y - P_null y)||_inf. Dense pseudoinverse up
/// to max_nodes, iterative least squares beyond.
double lambda_crit(std::span<const double> y, const Graph& g, int k, int dense_max_nodes = 500);

struct PathPoint {
  double lambda = 0.0;
  int df = 0;
  double objective = 0.0;
  double mse = 0.0;   // vs truth; NaN when no truth given
  double snr = 0.0;   // denoised negative SnR vs truth; NaN when no truth
  GtfFit fit;
};

struct PathResult {
  std::vector<PathPoint> points;
  bool has_truth = false;
};

/// Warm-started sweep over a decreasing lambda grid (auto grid: 50
/// geometric points from lambda_crit down four decades).
PathResult lambda_path(std::span<const double> y, GraphPtr g, int k, std::vector<double> grid,
                       const SolverOptions& opts = {}, Method method = Method::Auto,
                       std::span<const double> truth = {});

std::vector<double> auto_lambda_grid(std::span<const double> y, const Graph& g, int k,
                                     int points = 50, double decades = 4.0);

double mse(std::span<const double> beta_hat, std::span<const double> beta0);
/// Input negative SnR 10 log10(n sigma^2 / ||x||^2).
double noise_snr(std::span<const double> x, double sigma);
/// Denoised negative SnR 10 log10(MSE / ||x||^2); -inf when beta_hat == x.
double denoised_snr(std::span<const double> beta_hat, std::span<const double> x);

struct SteinResult {
  double empirical_df_mean = 0.0;  // mean of the per-rep Stein covariance estimates
  double standard_error = 0.0;
  std::vector<double> stein_per_rep;
  std::vector<double> estimate_per_rep;  // estimate_df over the same draws
};

/// Monte Carlo Stein oracle df = sum_i cov(betahat_i, y_i)/sigma^2 under
/// y ~ N(beta0, sigma^2 I); per-rep estimate uses the known beta0 so each
/// rep is exactly unbiased.
SteinResult stein_df_monte_carlo(GraphPtr g, int k, double lambda, std::span<const double> beta0,
                                 double sigma, int reps, std::uint64_t seed,
                                 Method method = Method::Auto);

}  // namespace gtf
