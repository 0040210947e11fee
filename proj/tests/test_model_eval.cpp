#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "gtf/dense.hpp"
#include "gtf/difference_op.hpp"
#include "gtf/model_eval.hpp"
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

}  // namespace

TEST_CASE("active set") {
  Rng rng(53);
  const auto g = gp(chain(8));
  const auto y = random_vector(rng, 8, 2.0);

  const auto all = solve(y, g, 0, 0.0);
  CHECK(active_set(all, *g).size() == 7);  // generic y: every edge difference nonzero

  const double crit = lambda_crit(y, *g, 0);
  const auto none = solve(y, g, 0, 2.0 * crit);
  CHECK(active_set(none, *g).empty());

  const auto pair = gp(chain(2));
  const auto two = solve(std::vector<double>{3.0, 1.0}, pair, 0, 0.5);
  const auto a = active_set(two, *pair);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == 0);
}

TEST_CASE("df estimates") {
  const auto c3 = gp(chain(3));
  GtfFit fit;
  fit.k = 0;
  fit.beta = {1.0, 1.0, 1.0};  // A empty
  CHECK(estimate_df(fit, *c3) == 1);

  fit.beta = {1.0, 1.0, 5.0};  // edge (1,2) active -> two components
  CHECK(estimate_df(fit, *c3) == 2);

  GtfFit odd;
  odd.k = 1;
  odd.beta = {2.0, 2.0, 2.0};  // L beta = 0 -> A empty -> max(|A|,1) = 1
  CHECK(estimate_df(odd, *c3) == 1);

  // disconnected graph: per-component sums
  const auto two_chains = gp(build_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}));
  GtfFit disc;
  disc.k = 0;
  disc.beta = {1.0, 1.0, 2.0, 2.0};
  CHECK(estimate_df(disc, *two_chains) == 2);
}

TEST_CASE("nullspace residual certifies the fitted structure") {
  Rng rng(59);
  const auto c30 = gp(chain(30));
  const auto y = random_vector(rng, 30, 2.0);
  const double crit = lambda_crit(y, *c30, 0);
  GtfFit constant;  // exactly constant beta: the span contains 1
  constant.k = 0;
  constant.beta.assign(30, 4.2);
  CHECK(nullspace_residual(constant, *c30) <= 1e-12);
  const auto flat = gtf_admm(y, c30, 0, 1.5 * crit);
  CHECK(nullspace_residual(flat, *c30) <= 1e-6);

  const auto mid = solve(y, c30, 0, 0.3 * crit);
  CHECK(nullspace_residual(mid, *c30) <= 1e-6);

  const auto g66 = gp(grid2d(6, 6));
  const auto y2 = random_vector(rng, 36, 2.0);
  const auto fit2 = gtf_admm(y2, g66, 2, 0.5);
  REQUIRE(fit2.converged);
  CHECK(nullspace_residual(fit2, *g66) <= 1e-6);

  const auto odd_fit = gtf_projected_newton(y2, g66, 1, 0.8);
  REQUIRE(odd_fit.converged);
  CHECK(nullspace_residual(odd_fit, *g66) <= 1e-6);

  const auto big = gp(chain(600));
  GtfFit fake;
  fake.k = 0;
  fake.beta.assign(600, 1.0);
  CHECK_THROWS_AS(nullspace_residual(fake, *big), Error);
}

TEST_CASE("lambda_crit: dense pseudoinverse path vs chain cumulative-sum closed form") {
  Rng rng(61);
  // On a tree the dual is unique, and for a chain it is the cumulative sum.
  for (int n : {10, 41}) {
    const Graph g = chain(n);
    const auto y = random_vector(rng, n, 3.0);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double cum = 0.0, expected = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      cum += y[i] - mean;
      expected = std::max(expected, std::abs(cum));
    }
    CHECK(lambda_crit(y, g, 0) == doctest::Approx(expected).epsilon(1e-10));
  }
  // iterative path beyond the dense limit agrees with the same closed form
  {
    const int n = 700;
    const Graph g = chain(n);
    const auto y = random_vector(rng, n);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double cum = 0.0, expected = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      cum += y[i] - mean;
      expected = std::max(expected, std::abs(cum));
    }
    CHECK(lambda_crit(y, g, 0) == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("lambda path") {
  Rng rng(67);
  const auto g = gp(grid2d(4, 4));
  const auto y = random_vector(rng, 16, 2.0);

  const auto path = lambda_path(y, g, 0, {});
  REQUIRE(path.points.size() == 50);
  CHECK(path.points.front().df == 1);
  CHECK(path.points.front().lambda == doctest::Approx(lambda_crit(y, *g, 0)));
  for (size_t i = 1; i < path.points.size(); ++i)
    CHECK(path.points[i].lambda < path.points[i - 1].lambda);

  const auto zero = lambda_path(y, g, 0, {0.0});
  REQUIRE(zero.points.size() == 1);
  CHECK(zero.points[0].df == 16);  // all edges active -> n singleton components

  CHECK_THROWS_AS(lambda_path(y, g, 0, {0.1, 0.2}), Error);

  // truth columns
  const auto with_truth = lambda_path(y, g, 0, {0.5, 0.1}, {}, Method::Auto, y);
  CHECK(with_truth.has_truth);
  CHECK(with_truth.points[1].mse <= with_truth.points[0].mse + 1e-12);

  // warm-started path points agree with cold solves, and df stays in [1, n]
  for (int k : {1, 2}) {
    const auto warm_path = lambda_path(y, g, k, {0.8, 0.3, 0.05});
    for (const auto& pt : warm_path.points) {
      const auto cold = solve(y, g, k, pt.lambda, k == 1 ? Method::Newton : Method::Admm);
      CHECK(std::abs(pt.objective - cold.objective) <=
            1e-6 * std::max(1.0, std::abs(cold.objective)));
      CHECK(pt.df >= 1);
      CHECK(pt.df <= 16);
    }
  }
}

TEST_CASE("error metrics") {
  const std::vector<double> b0{1.0, 2.0, 3.0};
  CHECK(mse(b0, b0) == 0.0);
  CHECK(std::isinf(denoised_snr(b0, b0)));
  CHECK(denoised_snr(b0, b0) < 0);

  // ||x||^2 = n, sigma = 1 -> 0 dB
  const std::vector<double> unit{1.0, -1.0, 1.0, -1.0};
  CHECK(noise_snr(unit, 1.0) == doctest::Approx(0.0));

  Rng rng(71);
  const auto a = random_vector(rng, 9);
  const auto b = random_vector(rng, 9);
  double direct = 0.0;
  for (int i = 0; i < 9; ++i) direct += (a[i] - b[i]) * (a[i] - b[i]);
  direct /= 9.0;
  CHECK(mse(a, b) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(denoised_snr(a, b) == doctest::Approx(10.0 * std::log10(direct / std::inner_product(
                                                   b.begin(), b.end(), b.begin(), 0.0))));
  CHECK_THROWS_AS(mse(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("stein monte carlo oracle") {
  const auto g = gp(grid2d(3, 3));
  std::vector<double> beta0(9, 0.0);
  for (int i = 0; i < 9; ++i) beta0[i] = i < 4 ? 1.0 : -1.0;

  CHECK_THROWS_AS(stein_df_monte_carlo(g, 0, 0.5, beta0, 1.0, 10, 1), Error);

  // lambda = 0: identity fit, df = n exactly per rep
  const auto identity = stein_df_monte_carlo(g, 0, 0.0, beta0, 1.0, 150, 2);
  CHECK(std::abs(identity.empirical_df_mean - 9.0) <= 3.0 * identity.standard_error + 1e-9);

  // enormous lambda, even k: constant fit, df -> 1
  const auto flat = stein_df_monte_carlo(g, 0, 1e5, beta0, 1.0, 150, 3);
  CHECK(std::abs(flat.empirical_df_mean - 1.0) <= 3.0 * flat.standard_error + 1e-6);
  for (double d : flat.estimate_per_rep) CHECK(d == 1.0);
}
