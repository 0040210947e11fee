#include "gtf/model_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gtf/dense.hpp"
#include "gtf/difference_op.hpp"
#include "gtf/rng.hpp"

namespace gtf {

namespace {

GraphPtr share(const Graph& g) {
  // Non-owning alias: model-eval entry points take plain Graph references
  // but the operator type holds a GraphPtr.
  return GraphPtr(&g, [](const Graph*) {});
}

}  // namespace

std::vector<int> active_set(const GtfFit& fit, const Graph& g) {
  DifferenceOperator op(share(g), fit.k);
  const auto d = op.apply(fit.beta);
  double dmax = 0.0;
  for (double v : d) dmax = std::max(dmax, std::abs(v));
  const double threshold = 1e-8 * std::max(1.0, dmax);
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    if (std::abs(d[i]) > threshold) active.push_back(i);
  return active;
}

int estimate_df(const GtfFit& fit, const Graph& g) {
  const auto active = active_set(fit, g);
  if (fit.k % 2 == 0) return connected_components(g, active).count;
  // Odd k: active rows are nodes; max{|A|,1} within each component of G.
  const auto components = connected_components(g, {});
  std::vector<int> per_component(components.count, 0);
  for (int a : active) ++per_component[components.labels[a]];
  int df = 0;
  for (int c : per_component) df += std::max(c, 1);
  return df;
}

double nullspace_residual(const GtfFit& fit, const Graph& g, int max_nodes) {
  const int n = g.num_nodes();
  if (n > max_nodes)
    fail(ErrorCode::TooLarge, "nullspace_residual dense path limited to " +
                                  std::to_string(max_nodes) + " nodes");
  const auto active = active_set(fit, g);
  const Eigen::MatrixXd lap = dense_laplacian(g);
  const auto graph_components = connected_components(g, {});

  std::vector<Eigen::VectorXd> basis_cols;
  for (int c = 0; c < graph_components.count; ++c) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
    for (int v = 0; v < n; ++v)
      if (graph_components.labels[v] == c) ind(v) = 1.0;
    basis_cols.push_back(ind);
  }
  if (fit.k % 2 == 0) {
    const Eigen::MatrixXd smoother = laplacian_pinv_power(lap, fit.k / 2);
    const auto cut_components = connected_components(g, active);
    for (int c = 0; c < cut_components.count; ++c) {
      Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
      for (int v = 0; v < n; ++v)
        if (cut_components.labels[v] == c) ind(v) = 1.0;
      basis_cols.push_back(smoother * ind);
    }
  } else {
    const Eigen::MatrixXd smoother = laplacian_pinv_power(lap, (fit.k + 1) / 2);
    for (int a : active) basis_cols.push_back(smoother.col(a));
  }
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(basis_cols.size()));
  for (size_t c = 0; c < basis_cols.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = basis_cols[c];
  return span_residual(basis, to_eigen(fit.beta));
}

namespace {

// Residual of y against the per-component mean (projection onto null(Delta)).
std::vector<double> null_space_residual_vector(std::span<const double> y, const Graph& g) {
  const auto components = connected_components(g, {});
  std::vector<double> sum(components.count, 0.0);
  std::vector<int> count(components.count, 0);
  for (int v = 0; v < g.num_nodes(); ++v) {
    sum[components.labels[v]] += y[v];
    ++count[components.labels[v]];
  }
  std::vector<double> r(y.begin(), y.end());
  for (int v = 0; v < g.num_nodes(); ++v) r[v] -= sum[components.labels[v]] / count[components.labels[v]];
  return r;
}

// Min-norm solution of Delta^T v = r by CGLS (iterates stay in range(Delta)).
std::vector<double> min_norm_dual_iterative(const DifferenceOperator& op, std::span<const double> r) {
  std::vector<double> v(op.rows(), 0.0);
  std::vector<double> s(r.begin(), r.end());  // residual in node space
  std::vector<double> t = op.apply(s);        // normal-equation residual
  std::vector<double> p = t;
  double gamma = std::inner_product(t.begin(), t.end(), t.begin(), 0.0);
  const double gamma0 = gamma;
  const int max_iter = 40 * (op.rows() + op.cols());
  for (int it = 0; it < max_iter && gamma > 1e-22 * std::max(gamma0, 1e-300); ++it) {
    const auto q = op.apply_transpose(p);
    const double qq = std::inner_product(q.begin(), q.end(), q.begin(), 0.0);
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    for (size_t i = 0; i < v.size(); ++i) v[i] += alpha * p[i];
    for (size_t i = 0; i < s.size(); ++i) s[i] -= alpha * q[i];
    t = op.apply(s);
    const double gamma_new = std::inner_product(t.begin(), t.end(), t.begin(), 0.0);
    const double beta = gamma_new / gamma;
    gamma = gamma_new;
    for (size_t i = 0; i < p.size(); ++i) p[i] = t[i] + beta * p[i];
  }
  return v;
}

}  // namespace

double lambda_crit(std::span<const double> y, const Graph& g, int k, int dense_max_nodes) {
  if (static_cast<int>(y.size()) != g.num_nodes())
    fail(ErrorCode::DimensionMismatch, "lambda_crit: signal length must match node count");
  DifferenceOperator op(share(g), k);
  if (op.rows() == 0) return 0.0;
  const auto r = null_space_residual_vector(y, g);
  std::vector<double> v;
  if (g.num_nodes() <= dense_max_nodes) {
    const Eigen::MatrixXd delta = op.dense(dense_max_nodes);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    Eigen::VectorXd inv = sv;
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    // (Delta^T)^dagger = U Sigma^dagger V^T
    const Eigen::VectorXd vd = svd.matrixU() * inv.asDiagonal() * (svd.matrixV().transpose() * to_eigen(r));
    v = from_eigen(vd);
  } else {
    v = min_norm_dual_iterative(op, r);
  }
  double vmax = 0.0;
  for (double vi : v) vmax = std::max(vmax, std::abs(vi));
  return vmax;
}

std::vector<double> auto_lambda_grid(std::span<const double> y, const Graph& g, int k, int points,
                                     double decades) {
  const double top = lambda_crit(y, g, k);
  if (!(top > 0.0)) return {0.0};
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = top * std::pow(10.0, -decades * static_cast<double>(i) / std::max(points - 1, 1));
  return grid;
}

PathResult lambda_path(std::span<const double> y, GraphPtr g, int k, std::vector<double> grid,
                       const SolverOptions& opts, Method method, std::span<const double> truth) {
  if (!g) fail(ErrorCode::InvalidParameter, "lambda_path needs a graph");
  if (grid.empty()) grid = auto_lambda_grid(y, *g, k);
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0) fail(ErrorCode::InvalidParameter, "lambda grid must be nonnegative");
    if (i > 0 && grid[i] >= grid[i - 1])
      fail(ErrorCode::InvalidParameter, "lambda grid must be strictly decreasing");
  }
  if (!truth.empty() && truth.size() != y.size())
    fail(ErrorCode::DimensionMismatch, "lambda_path: truth length must match signal");

  PathResult out;
  out.has_truth = !truth.empty();
  AdmmWarmState warm;
  std::vector<double> newton_warm;
  for (double lambda : grid) {
    Method chosen = method;
    if (chosen == Method::Auto) chosen = k == 0 ? Method::MaxFlow : (k == 1 ? Method::Newton : Method::Admm);
    GtfFit fit;
    if (chosen == Method::Newton) {
      fit = gtf_projected_newton(y, g, k, lambda, opts, newton_warm.empty() ? nullptr : &newton_warm);
      newton_warm = fit.dual;
    } else if (chosen == Method::Admm) {
      fit = gtf_admm(y, g, k, lambda, opts, &warm);
    } else {
      fit = solve(y, g, k, lambda, chosen, opts);
    }
    PathPoint pt;
    pt.lambda = lambda;
    pt.df = estimate_df(fit, *g);
    pt.objective = fit.objective;
    if (out.has_truth) {
      pt.mse = mse(fit.beta, truth);
      pt.snr = denoised_snr(fit.beta, truth);
    } else {
      pt.mse = std::numeric_limits<double>::quiet_NaN();
      pt.snr = std::numeric_limits<double>::quiet_NaN();
    }
    pt.fit = std::move(fit);
    out.points.push_back(std::move(pt));
  }
  return out;
}

double mse(std::span<const double> beta_hat, std::span<const double> beta0) {
  if (beta_hat.size() != beta0.size()) fail(ErrorCode::DimensionMismatch, "mse: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < beta_hat.size(); ++i) {
    const double d = beta_hat[i] - beta0[i];
    s += d * d;
  }
  return s / static_cast<double>(beta_hat.size());
}

double noise_snr(std::span<const double> x, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidParameter, "noise_snr needs sigma > 0");
  const double x2 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  return 10.0 * std::log10(static_cast<double>(x.size()) * sigma * sigma / x2);
}

double denoised_snr(std::span<const double> beta_hat, std::span<const double> x) {
  const double m = mse(beta_hat, x);
  const double x2 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  if (m == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(m / x2);
}

SteinResult stein_df_monte_carlo(GraphPtr g, int k, double lambda, std::span<const double> beta0,
                                 double sigma, int reps, std::uint64_t seed, Method method) {
  if (!g) fail(ErrorCode::InvalidParameter, "stein_df_monte_carlo needs a graph");
  if (reps < 100) fail(ErrorCode::InvalidParameter, "stein_df_monte_carlo needs reps >= 100");
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidParameter, "stein_df_monte_carlo needs sigma > 0");
  const int n = g->num_nodes();
  if (static_cast<int>(beta0.size()) != n)
    fail(ErrorCode::DimensionMismatch, "stein_df_monte_carlo: beta0 length must match node count");

  SteinResult out;
  out.stein_per_rep.resize(reps);
  out.estimate_per_rep.resize(reps);
  std::vector<double> y(n), z(n);
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
    for (int i = 0; i < n; ++i) {
      z[i] = rng.normal();
      y[i] = beta0[i] + sigma * z[i];
    }
    const GtfFit fit = solve(y, g, k, lambda, method);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += fit.beta[i] * z[i];
    out.stein_per_rep[rep] = s / sigma;
    out.estimate_per_rep[rep] = static_cast<double>(estimate_df(fit, *g));
  }
  double mean = 0.0;
  for (double s : out.stein_per_rep) mean += s;
  mean /= reps;
  double var = 0.0;
  for (double s : out.stein_per_rep) var += (s - mean) * (s - mean);
  var /= std::max(reps - 1, 1);
  out.empirical_df_mean = mean;
  out.standard_error = std::sqrt(var / reps);
  return out;
}

}  // namespace gtf
