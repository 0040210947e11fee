#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtf/dense.hpp"
#include "gtf/difference_op.hpp"
#include "gtf/rng.hpp"
#include "gtf/solvers.hpp"

using namespace gtf;

namespace {

GraphPtr gp(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

std::vector<double> random_vector(Rng& rng, int n, double scale = 1.0) {
  std::vector<double> x(n);
  for (double& v : x) v = scale * rng.normal();
  return x;
}

// Dense pseudoinverse oracle for the collapse threshold (SVD route on
// Delta^T directly, independent of the library's lambda_crit).
double lambda_crit_oracle(const std::vector<double>& y, const DifferenceOperator& op) {
  const Eigen::MatrixXd delta_t = op.dense().transpose();
  Eigen::VectorXd r = to_eigen(y);
  r.array() -= r.mean();
  const Eigen::VectorXd v = pseudoinverse(delta_t) * r;
  return v.cwiseAbs().maxCoeff();
}

void check_kkt(const std::vector<double>& y, const DifferenceOperator& op, const GtfFit& fit) {
  REQUIRE(static_cast<int>(fit.dual.size()) == op.rows());
  double vmax = 0.0;
  for (double v : fit.dual) vmax = std::max(vmax, std::abs(v));
  CHECK(vmax <= fit.lambda * (1 + 1e-8) + 1e-12);
  const auto atv = op.apply_transpose(fit.dual);
  for (size_t i = 0; i < y.size(); ++i)
    CHECK(std::abs(fit.beta[i] - (y[i] - atv[i])) <= 1e-6);
  // sign alignment on the active set
  const auto d = op.apply(fit.beta);
  double dmax = 0.0;
  for (double v : d) dmax = std::max(dmax, std::abs(v));
  const double threshold = 1e-8 * std::max(1.0, dmax);
  for (int l = 0; l < op.rows(); ++l)
    if (std::abs(d[l]) > threshold)
      CHECK(std::abs(fit.dual[l] - fit.lambda * (d[l] > 0 ? 1.0 : -1.0)) <=
            1e-6 * std::max(1.0, fit.lambda));
}

}  // namespace

TEST_CASE("soft threshold") {
  const auto out = soft_threshold(std::vector<double>{3, -1, 0.5}, 1.0);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  const std::vector<double> x{0.3, -2.0, 5.5};
  CHECK(soft_threshold(x, 0.0) == x);

  // exact scalar minimizer of 1/2 (b - t)^2 + lam |t| via grid search
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const double b = 4.0 * rng.normal();
    const double lam = 2.0 * rng.uniform();
    const double got = soft_threshold(std::vector<double>{b}, lam)[0];
    double best_t = 0.0, best_val = std::numeric_limits<double>::infinity();
    for (double t = -10.0; t <= 10.0; t += 1e-4) {
      const double val = 0.5 * (b - t) * (b - t) + lam * std::abs(t);
      if (val < best_val) {
        best_val = val;
        best_t = t;
      }
    }
    CHECK(std::abs(got - best_t) <= 2e-4);
  }
  CHECK_THROWS_AS(soft_threshold(x, -1.0), Error);
}

TEST_CASE("exact limits: lambda 0 and lambda above the critical value") {
  Rng rng(13);
  std::vector<Graph> graphs;
  graphs.push_back(chain(14));
  graphs.push_back(grid2d(4, 5));
  graphs.push_back(erdos_renyi(16, 0.3, 5));
  for (auto& g : graphs) {
    const auto shared = gp(std::move(g));
    const auto y = random_vector(rng, shared->num_nodes(), 2.0);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    for (int k = 0; k <= 2; ++k) {
      const DifferenceOperator op(shared, k);
      const auto zero_fit = solve(y, shared, k, 0.0);
      for (size_t i = 0; i < y.size(); ++i) CHECK(std::abs(zero_fit.beta[i] - y[i]) <= 1e-10);

      const double crit = lambda_crit_oracle(y, op);
      for (double lam : {crit, 2.0 * crit}) {
        const auto fit = gtf_admm(y, shared, k, lam);
        CHECK(fit.converged);
        for (size_t i = 0; i < y.size(); ++i) CHECK(std::abs(fit.beta[i] - mean) <= 1e-6);
        if (k <= 1) {
          const auto pn = gtf_projected_newton(y, shared, k, lam);
          CHECK(pn.converged);
          for (size_t i = 0; i < y.size(); ++i) CHECK(std::abs(pn.beta[i] - mean) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("two-node fused lasso closed form") {
  const auto pair = gp(chain(2));
  const std::vector<double> y{3.0, 1.0};
  const auto pn = gtf_projected_newton(y, pair, 0, 0.5);
  CHECK(pn.converged);
  CHECK(pn.beta[0] == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(pn.beta[1] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(std::abs(pn.dual[0]) == doctest::Approx(0.5).epsilon(1e-8));

  const auto mf = solve(y, pair, 0, 0.5, Method::MaxFlow);
  CHECK(mf.beta[0] == doctest::Approx(2.5).epsilon(1e-10));
  const auto ad = gtf_admm(y, pair, 0, 0.5);
  CHECK(ad.beta[0] == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("cross-solver agreement with KKT certificates") {
  Rng rng(23);
  std::vector<Graph> graphs;
  graphs.push_back(chain(30));
  graphs.push_back(grid2d(6, 8));
  graphs.push_back(erdos_renyi(40, 0.2, 11));
  SolverOptions ref_opts;
  ref_opts.tolerance = 1e-12;
  ref_opts.max_iterations = 400000;
  SolverOptions opts;  // tight enough that inactive rows fall below the
  opts.tolerance = 1e-10;  // 1e-8 active-set threshold in the KKT check
  opts.max_iterations = 100000;

  for (auto& g : graphs) {
    const auto shared = gp(std::move(g));
    for (int k = 0; k <= 2; ++k) {
      const DifferenceOperator op(shared, k);
      const auto y = random_vector(rng, shared->num_nodes(), 1.5);
      auto dy = op.apply(y);
      for (double& v : dy) v = std::abs(v);
      std::sort(dy.begin(), dy.end());
      const double med = std::max(dy[dy.size() / 2], 1e-3);
      for (double factor : {0.1, 1.0, 10.0}) {
        const double lam = factor * med;
        const auto reference = gtf_admm(y, shared, k, lam, ref_opts);
        const double ref_obj = reference.objective;

        std::vector<GtfFit> fits;
        fits.push_back(gtf_admm(y, shared, k, lam, opts));
        if (k <= 1) fits.push_back(gtf_projected_newton(y, shared, k, lam, opts));
        if (k == 0) fits.push_back(solve(y, shared, k, lam, Method::MaxFlow));
        for (const auto& fit : fits) {
          CHECK(fit.converged);
          CHECK(std::abs(fit.objective - ref_obj) <= 1e-6 * std::max(1.0, std::abs(ref_obj)));
          for (size_t i = 0; i < y.size(); ++i)
            CHECK(std::abs(fit.beta[i] - reference.beta[i]) <= 1e-4);
          check_kkt(y, op, fit);
          CHECK(std::abs(gtf_objective(y, op, lam, fit.beta) - fit.objective) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("chain k=2 cross-check: admm vs projected newton vs long run") {
  Rng rng(31);
  const auto shared = gp(chain(30));
  const auto y = random_vector(rng, 30);
  SolverOptions ref_opts;
  ref_opts.tolerance = 1e-12;
  ref_opts.max_iterations = 400000;
  const auto admm = gtf_admm(y, shared, 2, 1.0);
  const auto pn = gtf_projected_newton(y, shared, 2, 1.0);  // chain DDt is nonsingular
  const auto ref = gtf_admm(y, shared, 2, 1.0, ref_opts);
  CHECK(std::abs(admm.objective - ref.objective) <= 1e-6 * std::max(1.0, std::abs(ref.objective)));
  CHECK(std::abs(pn.objective - ref.objective) <= 1e-6 * std::max(1.0, std::abs(ref.objective)));
}

TEST_CASE("laplacian smoothing") {
  Rng rng(37);
  const Graph c10 = chain(10);
  const auto y = random_vector(rng, 10, 2.0);
  CHECK(laplacian_smooth(y, c10, 1, 0.0) == y);

  for (int k = 0; k <= 2; ++k) {
    const auto beta = laplacian_smooth(y, c10, k, 1.0);
    const Eigen::MatrixXd lap = dense_laplacian(c10);
    Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(10, 10);
    Eigen::MatrixXd lp = Eigen::MatrixXd::Identity(10, 10);
    for (int p = 0; p <= k; ++p) lp = lp * lap;
    sys += lp;
    const Eigen::VectorXd direct = sys.ldlt().solve(to_eigen(y));
    for (int i = 0; i < 10; ++i) CHECK(beta[i] == doctest::Approx(direct(i)).epsilon(1e-8));
    const Eigen::VectorXd resid = sys * to_eigen(beta) - to_eigen(y);
    CHECK(resid.norm() <= 1e-10 * to_eigen(y).norm());
  }

  const auto flat = laplacian_smooth(y, c10, 0, 1e12);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 10.0;
  for (double v : flat) CHECK(std::abs(v - mean) <= 1e-4);
}

namespace {

// Exact inner minimization over beta1 for the 2-node sparse GTF oracle:
// the minimizer sits at a kink (0 or beta0) or on a smooth branch.
double sparse2_inner(double y1, double b0, double l1, double l2, double* best_b1) {
  auto value = [&](double b1) {
    return 0.5 * (y1 - b1) * (y1 - b1) + l1 * std::abs(b1 - b0) + l2 * std::abs(b1);
  };
  std::vector<double> candidates{0.0, b0};
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0}) candidates.push_back(y1 - l1 * s1 - l2 * s2);
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  for (double c : candidates) {
    const double v = value(c);
    if (v < best) {
      best = v;
      arg = c;
    }
  }
  if (best_b1) *best_b1 = arg;
  return best;
}

}  // namespace

TEST_CASE("sparse gtf") {
  Rng rng(41);
  const auto g = gp(grid2d(4, 4));
  const auto y = random_vector(rng, 16, 2.0);

  // lambda2 = 0 reduces to plain GTF
  const auto plain = gtf_admm(y, g, 0, 0.4);
  const auto sparse0 = sparse_gtf(y, g, 0, 0.4, 0.0);
  CHECK(sparse0.converged);
  for (int i = 0; i < 16; ++i) CHECK(std::abs(sparse0.beta[i] - plain.beta[i]) <= 1e-7);

  // lambda1 = 0 is separable soft-thresholding
  const auto sep = sparse_gtf(y, g, 0, 0.0, 0.7);
  const auto st = soft_threshold(y, 0.7);
  for (int i = 0; i < 16; ++i) CHECK(sep.beta[i] == doctest::Approx(st[i]).epsilon(1e-12));

  // 2-node instance against a golden-section/KKT oracle
  const auto pair = gp(chain(2));
  const std::vector<double> y2{3.0, 1.0};
  const auto fit2 = sparse_gtf(y2, pair, 0, 0.5, 0.25);
  CHECK(fit2.converged);
  auto outer = [&](double b0) {
    return 0.5 * (3.0 - b0) * (3.0 - b0) + 0.25 * std::abs(b0) +
           sparse2_inner(1.0, b0, 0.5, 0.25, nullptr);
  };
  double lo = -5.0, hi = 5.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
  for (int it = 0; it < 120; ++it) {
    if (outer(c1) < outer(c2)) {
      hi = c2;
      c2 = c1;
      c1 = hi - phi * (hi - lo);
    } else {
      lo = c1;
      c1 = c2;
      c2 = lo + phi * (hi - lo);
    }
  }
  const double b0_star = 0.5 * (lo + hi);
  double b1_star = 0.0;
  sparse2_inner(1.0, b0_star, 0.5, 0.25, &b1_star);
  CHECK(fit2.beta[0] == doctest::Approx(b0_star).epsilon(1e-6));
  CHECK(fit2.beta[1] == doctest::Approx(b1_star).epsilon(1e-6));

  // exact zeros after thresholding
  const auto very_sparse = sparse_gtf(y, g, 0, 0.2, 50.0);
  for (double b : very_sparse.beta) CHECK((b == 0.0 || std::abs(b) > 1e-10));

  // two-block KKT: beta = y - Delta^T v - v2 with |v| <= lambda1 and
  // |v2| <= lambda2, sign-aligned with the support of beta
  SolverOptions tight;
  tight.tolerance = 1e-10;
  tight.max_iterations = 100000;
  for (int k : {0, 1}) {
    const double l1 = 0.3, l2 = 0.6;
    const auto fit = sparse_gtf(y, g, k, l1, l2, tight);
    REQUIRE(fit.converged);
    const DifferenceOperator op(g, k);
    double vmax = 0.0;
    for (double v : fit.dual) vmax = std::max(vmax, std::abs(v));
    CHECK(vmax <= l1 * (1 + 1e-8) + 1e-12);
    const auto atv = op.apply_transpose(fit.dual);
    for (int i = 0; i < 16; ++i) {
      const double v2 = y[i] - fit.beta[i] - atv[i];
      CHECK(std::abs(v2) <= l2 * (1 + 1e-8) + 1e-6);
      if (fit.beta[i] != 0.0)
        CHECK(std::abs(v2 - l2 * (fit.beta[i] > 0 ? 1.0 : -1.0)) <= 1e-5);
    }
  }
}

TEST_CASE("dispatcher and diagnostics") {
  Rng rng(47);
  const auto g = gp(grid2d(4, 4));
  const auto y = random_vector(rng, 16);

  CHECK(solve(y, g, 0, 0.1).method == "maxflow");
  CHECK(solve(y, g, 1, 0.1).method == "newton");
  CHECK(solve(y, g, 2, 0.1).method == "admm+maxflow");
  CHECK(solve(y, g, 3, 0.1).method == "admm+soft-threshold");
  CHECK_THROWS_AS(solve(y, g, 1, 0.1, Method::MaxFlow), Error);

  // k=0 auto equals the admm route within 1e-6
  const auto direct = solve(y, g, 0, 0.3);
  const auto admm = gtf_admm(y, g, 0, 0.3);
  for (int i = 0; i < 16; ++i) CHECK(std::abs(direct.beta[i] - admm.beta[i]) <= 1e-6);

  // unconverged runs are flagged, never thrown
  SolverOptions tight;
  tight.max_iterations = 2;
  const auto flagged = gtf_admm(y, g, 2, 0.5, tight);
  CHECK(!flagged.converged);
  CHECK(flagged.iterations == 2);

  // determinism: identical options give bit-identical fits
  const auto a = gtf_admm(y, g, 2, 0.5);
  const auto b = gtf_admm(y, g, 2, 0.5);
  CHECK(a.beta == b.beta);
  CHECK(a.dual == b.dual);
  const auto p1 = gtf_projected_newton(y, g, 1, 0.5);
  const auto p2 = gtf_projected_newton(y, g, 1, 0.5);
  CHECK(p1.beta == p2.beta);
}
