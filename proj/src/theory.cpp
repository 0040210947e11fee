#include "gtf/theory.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtf/dense.hpp"
#include "gtf/difference_op.hpp"
#include "gtf/flow.hpp"
#include "gtf/graph.hpp"
#include "gtf/model_eval.hpp"
#include "gtf/rng.hpp"
#include "gtf/synthesis.hpp"

namespace gtf {

EigenPairs chain_neumann_eigenpairs(int n) {
  if (n < 2) fail(ErrorCode::InvalidParameter, "chain eigenpairs need n >= 2");
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sin(M_PI * i / (2.0 * n));
    out.values(i) = 4.0 * s * s;
    for (int j = 0; j < n; ++j)
      out.vectors(j, i) = i == 0 ? 1.0 / std::sqrt(static_cast<double>(n))
                                 : std::sqrt(2.0 / n) * std::cos(M_PI * i * (j + 0.5) / n);
  }
  return out;
}

EigenPairs chain_dirichlet_eigenpairs(int n) {
  if (n < 2) fail(ErrorCode::InvalidParameter, "chain eigenpairs need n >= 2");
  const int m = n - 1;
  EigenPairs out;
  out.values.resize(m);
  out.vectors.resize(m, m);
  for (int i = 1; i <= m; ++i) {
    const double s = std::sin(M_PI * i / (2.0 * n));
    out.values(i - 1) = 4.0 * s * s;
    for (int j = 1; j <= m; ++j)
      out.vectors(j - 1, i - 1) = std::sqrt(2.0 / n) * std::sin(M_PI * i * j / n);
  }
  return out;
}

EigenPairs grid_eigenpairs(int rows, int cols) {
  if (rows < 2 || cols < 2) fail(ErrorCode::InvalidParameter, "grid eigenpairs need rows, cols >= 2");
  const EigenPairs row_pairs = chain_neumann_eigenpairs(rows);
  const EigenPairs col_pairs = chain_neumann_eigenpairs(cols);
  const int n = rows * cols;
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  int col = 0;
  for (int j1 = 0; j1 < rows; ++j1)
    for (int j2 = 0; j2 < cols; ++j2, ++col) {
      out.values(col) = row_pairs.values(j1) + col_pairs.values(j2);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          out.vectors(r * cols + c, col) = row_pairs.vectors(r, j1) * col_pairs.vectors(c, j2);
    }
  return out;
}

double incoherence_constant(const Eigen::MatrixXd& vectors, int n) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c)
    if (std::abs(vectors.col(c).norm() - 1.0) > 1e-8)
      fail(ErrorCode::NotUnitNorm, "incoherence_constant expects unit-norm columns");
  return std::sqrt(static_cast<double>(n)) * vectors.cwiseAbs().maxCoeff();
}

GridDdtFamilies grid_ddt_eigenvector_families(int ell) {
  if (ell < 3) fail(ErrorCode::InvalidParameter, "grid DDt families need ell >= 3");
  const int n = ell * ell;
  const int m = 2 * ell * (ell - 1);
  const Graph grid = grid2d(ell, ell);

  // Map grid edges onto the appendix block layout [I (x) D1d ; D1d (x) I]:
  // row edges (r,c)-(r,c+1) first, column edges (r,c)-(r+1,c) second.
  std::vector<int> block_of_edge(m);
  for (int e = 0; e < m; ++e) {
    const auto& edge = grid.edge(e);
    const int ri = edge.i / ell, ci = edge.i % ell;
    const int rj = edge.j / ell, cj = edge.j % ell;
    if (ri == rj)
      block_of_edge[e] = ri * (ell - 1) + ci;  // row edge, c-index ci
    else
      block_of_edge[e] = ell * (ell - 1) + ri * ell + cj;  // column edge (ci == cj)
  }
  std::vector<int> edge_of_block(m);
  for (int e = 0; e < m; ++e) edge_of_block[block_of_edge[e]] = e;

  const EigenPairs dirichlet = chain_dirichlet_eigenpairs(ell);  // u_i, lambda_i
  const int nd = ell - 1;
  Eigen::MatrixXd d1d = Eigen::MatrixXd::Zero(nd, ell);
  for (int i = 0; i < nd; ++i) {
    d1d(i, i) = -1.0;
    d1d(i, i + 1) = 1.0;
  }
  Eigen::MatrixXd v(ell, nd);  // v_i = D1d^T u_i / sqrt(lambda_i)
  for (int i = 0; i < nd; ++i)
    v.col(i) = d1d.transpose() * dirichlet.vectors.col(i) / std::sqrt(dirichlet.values(i));
  const Eigen::VectorXd ones_e = Eigen::VectorXd::Constant(ell, 1.0 / std::sqrt(double(ell)));

  auto kron = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
      for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
    return out;
  };

  std::vector<Eigen::VectorXd> family;
  std::vector<double> values;
  auto push = [&](const Eigen::VectorXd& top, const Eigen::VectorXd& bottom, double value) {
    Eigen::VectorXd blocked(m);
    blocked.head(ell * (ell - 1)) = top;
    blocked.tail(ell * (ell - 1)) = bottom;
    blocked /= blocked.norm();
    Eigen::VectorXd in_edge_order(m);
    for (int e = 0; e < m; ++e) in_edge_order(e) = blocked(block_of_edge[e]);
    family.push_back(std::move(in_edge_order));
    values.push_back(value);
  };

  const Eigen::VectorXd zero_block = Eigen::VectorXd::Zero(ell * (ell - 1));
  for (int i = 0; i < nd; ++i) {
    const double li = dirichlet.values(i);
    push(kron(v.col(i), dirichlet.vectors.col(i)), kron(dirichlet.vectors.col(i), v.col(i)),
         2.0 * li);
    push(kron(ones_e, dirichlet.vectors.col(i)), zero_block, li);
    push(zero_block, kron(dirichlet.vectors.col(i), ones_e), li);
  }
  for (int i = 0; i < nd; ++i)
    for (int j = i + 1; j < nd; ++j) {
      const double li = dirichlet.values(i), lj = dirichlet.values(j);
      const double rij = std::sqrt(li / lj), rji = std::sqrt(lj / li);
      const Eigen::VectorXd viuj = kron(v.col(i), dirichlet.vectors.col(j));
      const Eigen::VectorXd vjui = kron(v.col(j), dirichlet.vectors.col(i));
      const Eigen::VectorXd uivj = kron(dirichlet.vectors.col(i), v.col(j));
      const Eigen::VectorXd ujvi = kron(dirichlet.vectors.col(j), v.col(i));
      push(viuj + vjui, rij * uivj + rji * ujvi, li + lj);
      push(rji * viuj + rij * vjui, uivj + ujvi, li + lj);
    }

  GridDdtFamilies out;
  out.vectors.resize(m, static_cast<Eigen::Index>(family.size()));
  out.values.resize(static_cast<Eigen::Index>(values.size()));
  for (size_t c = 0; c < family.size(); ++c) {
    out.vectors.col(static_cast<Eigen::Index>(c)) = family[c];
    out.values(static_cast<Eigen::Index>(c)) = values[c];
  }

  const Eigen::MatrixXd d = dense_incidence(grid);
  const Eigen::MatrixXd ddt = d * d.transpose();
  out.max_eigen_residual = 0.0;
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    const Eigen::VectorXd resid = ddt * out.vectors.col(c) - out.values(c) * out.vectors.col(c);
    out.max_eigen_residual = std::max(out.max_eigen_residual, resid.cwiseAbs().maxCoeff());
  }
  out.mu = incoherence_constant(out.vectors, n);
  return out;
}

namespace {

// Atoms of (D^(1))^dagger: g_i = h_i - mean(h_i), h_i the indicator of
// rows > i. Stored as columns, i = 1..n-1.
Eigen::MatrixXd fused_lasso_atoms(int n) {
  Eigen::MatrixXd g(n, n - 1);
  for (int i = 1; i <= n - 1; ++i) {
    const double mean = static_cast<double>(n - i) / n;
    for (int r = 0; r < n; ++r) g(r, i - 1) = (r + 1 > i ? 1.0 : 0.0) - mean;
  }
  return g;
}

std::vector<int> stride_centers(int atom_count, int balls) {
  // 1-based atom indices at roughly stride/2 + t*stride, clamped.
  std::vector<int> centers;
  const int stride = (atom_count + balls - 1) / balls;
  for (int t = 0; t < balls; ++t)
    centers.push_back(std::min((stride + 1) / 2 + t * stride, atom_count));
  return centers;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys, double* intercept,
                 double* stderr_out) {
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  if (intercept) *intercept = my - slope * mx;
  if (stderr_out) {
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (my + slope * (xs[i] - mx));
      rss += r * r;
    }
    *stderr_out = n > 2 ? std::sqrt(rss / ((n - 2) * sxx)) : 0.0;
  }
  return slope;
}

}  // namespace

double covering_bound(int n, int j) { return std::sqrt(2.0 * n / j); }

double covering_radius_fused_lasso(int n, int j) {
  if (n < 3) fail(ErrorCode::InvalidParameter, "covering check needs n >= 3");
  if (j < 1 || j > 2 * (n - 1))
    fail(ErrorCode::InvalidParameter, "covering check needs 1 <= j <= 2(n-1)");
  const Eigen::MatrixXd atoms = fused_lasso_atoms(n);
  const int na = n - 1;

  // Centers: one mid atom for j=1, otherwise ceil(j/2) stride-spaced
  // positive atoms and floor(j/2) negative ones.
  std::vector<std::pair<int, int>> centers;  // (atom index 1-based, sign)
  if (j == 1) {
    centers.emplace_back((na + 1) / 2, +1);
  } else {
    for (int c : stride_centers(na, (j + 1) / 2)) centers.emplace_back(c, +1);
    for (int c : stride_centers(na, j / 2)) centers.emplace_back(c, -1);
  }

  double radius = 0.0;
  for (int i = 1; i <= na; ++i)
    for (int sign : {+1, -1}) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [c, csign] : centers) {
        const double d = (sign * atoms.col(i - 1) - csign * atoms.col(c - 1)).norm();
        best = std::min(best, d);
      }
      radius = std::max(radius, best);
    }
  return radius;
}

double atom_distance_bound_violation(int n) {
  const Eigen::MatrixXd atoms = fused_lasso_atoms(n);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 2; i <= n - 1; ++i)
    for (int l = 1; l < i; ++l) {
      const double d = (atoms.col(i - 1) - atoms.col(l - 1)).norm();
      worst = std::max(worst, d - std::sqrt(static_cast<double>(i - l)));
    }
  return worst;
}

double pinv_norm_scaling(int k, const std::vector<int>& n_list) {
  if (n_list.size() < 4) fail(ErrorCode::InvalidParameter, "pinv_norm_scaling needs >= 4 sizes");
  std::vector<double> xs, ys;
  for (int n : n_list) {
    if (n > 500) fail(ErrorCode::TooLarge, "pinv_norm_scaling dense path limited to n <= 500");
    const double m = max_column_norm_pinv(univariate_difference_operator(n, k));
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(m));
  }
  return fit_slope(xs, ys, nullptr, nullptr);
}

RateSweepResult rate_sweep(const std::vector<int>& n_list, int reps, std::uint64_t seed,
                           int lambda_grid_points) {
  if (n_list.size() < 2) fail(ErrorCode::InvalidParameter, "rate_sweep needs several sizes");
  const auto [mn, mx] = std::minmax_element(n_list.begin(), n_list.end());
  if (*mx < 16 * *mn)
    fail(ErrorCode::InvalidParameter, "rate_sweep needs n_list spanning at least 4 octaves");
  if (reps < 20) fail(ErrorCode::InvalidParameter, "rate_sweep needs reps >= 20");

  RateSweepResult out;
  std::vector<double> xs, ys;
  for (size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    const GraphPtr g = std::make_shared<const Graph>(chain(n));
    // Piecewise-constant truth with total variation 3, independent of n.
    std::vector<double> beta0(n);
    for (int i = 0; i < n; ++i) {
      const int block = std::min(4 * i / n, 3);
      beta0[i] = block == 1 ? 1.0 : (block == 3 ? -1.0 : 0.0);
    }
    double mse_sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const std::uint64_t stream = seed + 1000003ull * static_cast<std::uint64_t>(ni);
      const auto y = add_noise(beta0, 1.0, Rng::substream(stream, rep).next_u64());
      const double top = lambda_crit(y, *g, 0);
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < lambda_grid_points; ++t) {
        const double lam = top * std::pow(10.0, -3.0 * t / (lambda_grid_points - 1));
        const auto x = tv_denoise(*g, y, lam);
        best = std::min(best, mse(x, beta0));
      }
      mse_sum += best;
    }
    const double mean_mse = mse_sum / reps;
    out.mse_by_n.emplace_back(n, mean_mse);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(mean_mse));
  }
  out.slope = fit_slope(xs, ys, &out.intercept, &out.slope_stderr);
  return out;
}

namespace {

using nlohmann::ordered_json;

void check_eigen_construction(std::vector<TheoryReport>& reports, const std::string& name,
                              const Eigen::MatrixXd& op, const EigenPairs& pairs, double mu_bound,
                              double entry_bound, int incoherence_n, ordered_json params) {
  double resid = 0.0;
  for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
    const Eigen::VectorXd r = op * pairs.vectors.col(c) - pairs.values(c) * pairs.vectors.col(c);
    resid = std::max(resid, r.cwiseAbs().maxCoeff());
  }
  reports.push_back({name + "-residual", params, resid, 1e-8, resid <= 1e-8});

  const Eigen::MatrixXd gram =
      pairs.vectors.transpose() * pairs.vectors -
      Eigen::MatrixXd::Identity(pairs.vectors.cols(), pairs.vectors.cols());
  const double ortho = gram.cwiseAbs().maxCoeff();
  reports.push_back({name + "-orthonormal", params, ortho, 1e-10, ortho <= 1e-10});

  // Eigenvalue multiset against a numeric eigendecomposition.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> numeric(op);
  Eigen::VectorXd formula = pairs.values;
  std::sort(formula.data(), formula.data() + formula.size());
  double value_err = 0.0;
  if (numeric.eigenvalues().size() == formula.size()) {
    for (Eigen::Index i = 0; i < formula.size(); ++i)
      value_err = std::max(value_err, std::abs(numeric.eigenvalues()(i) - formula(i)));
  } else {
    value_err = std::numeric_limits<double>::infinity();
  }
  reports.push_back({name + "-values", params, value_err, 1e-8, value_err <= 1e-8});

  if (entry_bound > 0.0) {
    const double max_entry = pairs.vectors.cwiseAbs().maxCoeff();
    reports.push_back(
        {name + "-entry-bound", params, max_entry, entry_bound, max_entry <= entry_bound + 1e-12});
  }
  const double mu = incoherence_constant(pairs.vectors, incoherence_n);
  reports.push_back({name + "-incoherence", params, mu, mu_bound, mu <= mu_bound + 1e-12});
}

bool wants(const TheoryOptions& o, const std::string& check) {
  return o.only_check.empty() || o.only_check == check;
}

}  // namespace

std::vector<TheoryReport> run_theory_suite(const TheoryOptions& options) {
  std::vector<TheoryReport> reports;

  if (wants(options, "chain-neumann")) {
    for (int n : options.chain_sizes) {
      const Graph g = chain(n);
      check_eigen_construction(reports, "chain-neumann", dense_laplacian(g),
                               chain_neumann_eigenpairs(n), std::sqrt(2.0), std::sqrt(2.0 / n), n,
                               ordered_json{{"n", n}});
    }
  }
  if (wants(options, "chain-dirichlet")) {
    for (int n : options.chain_sizes) {
      const Graph g = chain(n);
      const Eigen::MatrixXd d = dense_incidence(g);
      check_eigen_construction(reports, "chain-dirichlet", d * d.transpose(),
                               chain_dirichlet_eigenpairs(n), std::sqrt(2.0), std::sqrt(2.0 / n),
                               n - 1, ordered_json{{"n", n}});
    }
  }
  if (wants(options, "grid-eigen")) {
    for (int ell : options.grid_sizes) {
      const Graph g = grid2d(ell, ell);
      check_eigen_construction(reports, "grid-eigen", dense_laplacian(g), grid_eigenpairs(ell, ell),
                               2.0, 2.0 / std::sqrt(double(ell) * ell), ell * ell,
                               ordered_json{{"ell", ell}});
    }
  }
  if (wants(options, "grid-ddt-incoherence")) {
    for (int ell : options.grid_sizes) {
      if (ell < 3) continue;
      const auto fam = grid_ddt_eigenvector_families(ell);
      const ordered_json params{{"ell", ell}};
      reports.push_back({"grid-ddt-residual", params, fam.max_eigen_residual, 1e-8,
                         fam.max_eigen_residual <= 1e-8});
      reports.push_back({"grid-ddt-incoherence", params, fam.mu, 4.0, fam.mu <= 4.0 + 1e-12});
      // Constructed eigenvalues must exhaust the numeric nonzero spectrum.
      const Graph g = grid2d(ell, ell);
      const Eigen::MatrixXd d = dense_incidence(g);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> numeric(d * d.transpose());
      std::vector<double> nonzero;
      for (Eigen::Index i = 0; i < numeric.eigenvalues().size(); ++i)
        if (numeric.eigenvalues()(i) > 1e-10 * numeric.eigenvalues().maxCoeff())
          nonzero.push_back(numeric.eigenvalues()(i));
      std::vector<double> constructed(fam.values.data(), fam.values.data() + fam.values.size());
      std::sort(constructed.begin(), constructed.end());
      double err = std::numeric_limits<double>::infinity();
      if (nonzero.size() == constructed.size()) {
        err = 0.0;
        for (size_t i = 0; i < nonzero.size(); ++i)
          err = std::max(err, std::abs(nonzero[i] - constructed[i]));
      }
      reports.push_back({"grid-ddt-spectrum", params, err, 1e-8, err <= 1e-8});
    }
  }
  if (wants(options, "covering")) {
    const int n = options.covering_n;
    double worst_excess = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int j = 1; j <= 2 * (n - 1); ++j) {
      const double radius = covering_radius_fused_lasso(n, j);
      const double bound = covering_bound(n, j);
      worst_excess = std::max(worst_excess, radius - bound);
      ok = ok && radius <= bound;
    }
    reports.push_back(
        {"covering", ordered_json{{"n", n}, {"j", "1..2(n-1)"}}, worst_excess, 0.0, ok});
  }
  if (wants(options, "atom-distance")) {
    const double violation = atom_distance_bound_violation(options.atom_n);
    reports.push_back({"atom-distance", ordered_json{{"n", options.atom_n}}, violation, 0.0,
                       violation <= 1e-12});
  }
  if (wants(options, "pinv-scaling")) {
    for (int k : {0, 1, 2}) {
      const double slope = pinv_norm_scaling(k, options.scaling_sizes);
      const double expected = k + 0.5;
      reports.push_back({"pinv-scaling",
                         ordered_json{{"k", k}, {"n_list", options.scaling_sizes}}, slope, expected,
                         std::abs(slope - expected) <= 0.15});
    }
  }
  if (wants(options, "crude-bound")) {
    // M <= 1 / xi_min(Delta), smallest nonzero singular value.
    struct Case {
      const char* name;
      Graph g;
      int k;
    };
    std::vector<Case> cases;
    cases.push_back({"chain32-k0", chain(32), 0});
    cases.push_back({"chain32-k1", chain(32), 1});
    cases.push_back({"grid4x4-k0", grid2d(4, 4), 0});
    for (auto& c : cases) {
      DifferenceOperator op(std::make_shared<const Graph>(std::move(c.g)), c.k);
      const Eigen::MatrixXd delta = op.dense();
      const double m_val = max_column_norm_pinv(delta);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(delta);
      double xi_min = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double s = svd.singularValues()(i);
        if (s > 1e-10 * svd.singularValues()(0)) xi_min = std::min(xi_min, s);
      }
      reports.push_back({"crude-bound", ordered_json{{"case", c.name}}, m_val, 1.0 / xi_min,
                         m_val <= 1.0 / xi_min * (1.0 + 1e-12)});
    }
  }
  if (wants(options, "rate")) {
    const auto rate = rate_sweep(options.rate_sizes, options.rate_reps, options.seed);
    reports.push_back({"rate",
                       ordered_json{{"n_list", options.rate_sizes},
                                    {"reps", options.rate_reps},
                                    {"stderr", rate.slope_stderr}},
                       rate.slope, -2.0 / 3.0,
                       rate.slope >= -0.85 && rate.slope <= -0.50});
  }
  if (wants(options, "er-lambda-min")) {
    // Report-only: empirical ratio lambda_min(L) / (d - sqrt(d)).
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int d : {8, 16}) {
      for (int s = 0; s < 10; ++s) {
        const Graph g = erdos_renyi(200, d / 200.0, options.seed + s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_laplacian(g));
        double lam_min = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
          if (eig.eigenvalues()(i) > 1e-8) lam_min = std::min(lam_min, eig.eigenvalues()(i));
        worst_ratio = std::min(worst_ratio, lam_min / (d - std::sqrt(double(d))));
      }
    }
    reports.push_back({"er-lambda-min", ordered_json{{"n", 200}, {"d", {8, 16}}, {"seeds", 10}},
                       worst_ratio, 0.0, true});
  }
  return reports;
}

}  // namespace gtf
