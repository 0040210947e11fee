#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "gtf/dense.hpp"
#include "gtf/rng.hpp"
#include "gtf/transduction.hpp"

using namespace gtf;

namespace {

GraphPtr gp(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

}  // namespace

TEST_CASE("lambda 0 closed form") {
  const auto g = gp(chain(4));
  MadProblem p = make_mad_problem(g, 2, {0, 3}, {0, 1}, 0.0, 0);
  const auto fit = mad_gtf(p);
  for (int i = 0; i < 4; ++i) {
    const bool observed = i == 0 || i == 3;
    for (int j = 0; j < 2; ++j) {
      const double expected =
          (p.Y(i, j) * (observed ? 1.0 : 0.0) + p.epsilon * p.R(i, j)) / ((observed ? 1.0 : 0.0) + p.epsilon);
      CHECK(std::abs(fit.B(i, j) - expected) <= 1e-10);
    }
  }
  const auto lap = mad_laplacian(p);
  CHECK((lap.B - fit.B).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("two-class chain splits into contiguous blocks") {
  const auto g = gp(chain(4));
  MadProblem p = make_mad_problem(g, 2, {0, 3}, {0, 1}, 0.1, 0);
  const auto fit = mad_gtf(p);
  CHECK(fit.labels[0] == 0);
  CHECK(fit.labels[3] == 1);
  // two contiguous blocks: the label sequence is nondecreasing
  for (int i = 0; i + 1 < 4; ++i) CHECK(fit.labels[i] <= fit.labels[i + 1]);
  // KKT for this symmetric instance: the interior fuses at exactly 1/2 in
  // both columns, so the tie-break assigns the interior to class 0
  CHECK(std::abs(fit.B(1, 0) - 0.5) <= 1e-7);
  CHECK(std::abs(fit.B(2, 1) - 0.5) <= 1e-7);
  CHECK(fit.labels[1] == 0);
  CHECK(fit.labels[2] == 0);
  for (double r : fit.kkt_residual_per_class) CHECK(r <= 1e-6);
}

TEST_CASE("column separability and unique optimum") {
  Rng rng(83);
  const auto g = gp(grid2d(3, 4));
  MadProblem p = make_mad_problem(g, 3, {0, 5, 11}, {0, 1, 2}, 0.4, 0);
  const auto joint = mad_gtf(p);

  // independent per-column solves reproduce the joint fit exactly
  std::vector<char> observed(12, 0);
  for (int i : p.observed) observed[i] = 1;
  for (int j = 0; j < 3; ++j) {
    QuadraticLoss loss;
    loss.a_diag.resize(12);
    loss.c.resize(12);
    for (int i = 0; i < 12; ++i) {
      loss.a_diag[i] = 2.0 * (observed[i] ? 1.0 : 0.0) + 2.0 * p.epsilon;
      loss.c[i] = 2.0 * (observed[i] ? p.Y(i, j) : 0.0) + 2.0 * p.epsilon * p.R(i, j);
    }
    const auto column = admm_quadratic(loss, g, 0, p.lambda);
    for (int i = 0; i < 12; ++i) CHECK(std::abs(column.beta[i] - joint.B(i, j)) <= 1e-10);

    // strict convexity: a perturbed warm start lands on the same optimum
    AdmmWarmState warm;
    warm.k = 0;
    warm.beta.assign(12, 0.0);
    warm.z.assign(12, 0.0);
    warm.u.assign(12, 0.0);
    for (int i = 0; i < 12; ++i) {
      warm.beta[i] = rng.normal();
      warm.z[i] = warm.beta[i] + 0.1 * rng.normal();
      warm.u[i] = 0.05 * rng.normal();
    }
    const auto perturbed = admm_quadratic(loss, g, 0, p.lambda, {}, &warm);
    CHECK(perturbed.converged);
    for (int i = 0; i < 12; ++i) CHECK(std::abs(perturbed.beta[i] - column.beta[i]) <= 1e-6);
  }
}

TEST_CASE("imputation rule") {
  Eigen::MatrixXd b(3, 3);
  b << 0.2, 0.7, 0.1, 0.5, 0.5, 0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const auto labels = impute_labels(b, {}, {});
  CHECK(labels[0] == 1);
  CHECK(labels[1] == 0);  // tie -> lowest class index
  CHECK(labels[2] == 0);

  const auto pinned = impute_labels(b, {0}, {2});
  CHECK(pinned[0] == 2);  // observed nodes keep the observed label
}

TEST_CASE("misclassification rate") {
  const std::vector<int> truth{0, 1, 0, 1};
  CHECK(misclassification_rate(truth, truth, {0, 1, 2, 3}) == 0.0);
  CHECK(misclassification_rate({1, 0, 1, 0}, truth, {0, 1, 2, 3}) == 1.0);
  CHECK(misclassification_rate({0, 1, 1, 0}, truth, {0, 1, 2, 3}) == 0.5);
  CHECK_THROWS_AS(misclassification_rate({0, 1}, truth, {0}), Error);
  CHECK_THROWS_AS(misclassification_rate(truth, truth, {}), Error);
}

TEST_CASE("mad laplacian against a dense solve") {
  const auto g = gp(chain(4));
  MadProblem p = make_mad_problem(g, 2, {0, 3}, {0, 1}, 0.7, 0);
  const auto fit = mad_laplacian(p);

  const Eigen::MatrixXd lap = dense_laplacian(*g);
  Eigen::MatrixXd a = p.lambda * lap;
  for (int i = 0; i < 4; ++i) a(i, i) += ((i == 0 || i == 3) ? 1.0 : 0.0) + p.epsilon;
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd rhs(4);
    for (int i = 0; i < 4; ++i)
      rhs(i) = ((i == 0 || i == 3) ? p.Y(i, j) : 0.0) + p.epsilon * p.R(i, j);
    const Eigen::VectorXd direct = a.ldlt().solve(rhs);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(fit.B(i, j) - direct(i)) <= 1e-9);
  }

  // lambda -> infinity: every column collapses to its eps-weighted mean
  MadProblem huge = p;
  huge.lambda = 1e8;
  const auto flat = mad_laplacian(huge);
  for (int j = 0; j < 2; ++j) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
      num += ((i == 0 || i == 3) ? p.Y(i, j) : 0.0) + p.epsilon * p.R(i, j);
      den += ((i == 0 || i == 3) ? 1.0 : 0.0) + p.epsilon;
    }
    for (int i = 0; i < 4; ++i) CHECK(std::abs(flat.B(i, j) - num / den) <= 1e-5);
  }
}

TEST_CASE("problem validation") {
  const auto g = gp(chain(4));
  MadProblem p = make_mad_problem(g, 2, {0, 3}, {0, 1}, 0.1, 0);
  p.epsilon = 0.0;
  CHECK_THROWS_AS(mad_gtf(p), Error);
  CHECK_THROWS_AS(make_mad_problem(g, 2, {0, 9}, {0, 1}, 0.1, 0), Error);
  CHECK_THROWS_AS(make_mad_problem(g, 2, {0, 3}, {0, 5}, 0.1, 0), Error);
}
