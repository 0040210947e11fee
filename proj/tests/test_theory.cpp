#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "gtf/dense.hpp"
#include "gtf/graph.hpp"
#include "gtf/theory.hpp"

using namespace gtf;

TEST_CASE("chain Neumann eigenpairs") {
  const auto p2 = chain_neumann_eigenpairs(2);
  CHECK(p2.values(0) == doctest::Approx(0.0));
  CHECK(p2.values(1) == doctest::Approx(2.0));
  CHECK(p2.vectors(0, 0) == doctest::Approx(p2.vectors(1, 0)));  // constant first vector

  for (int n : {16, 64}) {
    const auto pairs = chain_neumann_eigenpairs(n);
    const Eigen::MatrixXd lap = dense_laplacian(chain(n));
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r = lap * pairs.vectors.col(i) - pairs.values(i) * pairs.vectors.col(i);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
    }
    const Eigen::MatrixXd gram =
        pairs.vectors.transpose() * pairs.vectors - Eigen::MatrixXd::Identity(n, n);
    CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> numeric(lap);
    Eigen::VectorXd sorted = pairs.values;
    std::sort(sorted.data(), sorted.data() + n);
    CHECK((numeric.eigenvalues() - sorted).cwiseAbs().maxCoeff() <= 1e-8);

    CHECK(incoherence_constant(pairs.vectors, n) <= std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("chain Dirichlet eigenpairs") {
  const auto p2 = chain_dirichlet_eigenpairs(2);
  CHECK(p2.values(0) == doctest::Approx(2.0));
  CHECK(std::abs(p2.vectors(0, 0)) == doctest::Approx(1.0));

  for (int n : {16, 64}) {
    const Graph g = chain(n);
    const Eigen::MatrixXd d = dense_incidence(g);
    const Eigen::MatrixXd ddt = d * d.transpose();
    const auto pairs = chain_dirichlet_eigenpairs(n);
    for (int i = 0; i < n - 1; ++i) {
      const Eigen::VectorXd r = ddt * pairs.vectors.col(i) - pairs.values(i) * pairs.vectors.col(i);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
    }
    // vectors match the numeric decomposition up to sign (distinct spectrum)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> numeric(ddt);
    for (int i = 0; i < n - 1; ++i) {
      const Eigen::VectorXd u = pairs.vectors.col(i);
      const Eigen::VectorXd v = numeric.eigenvectors().col(i);
      CHECK(std::min((u - v).norm(), (u + v).norm()) <= 1e-8);
    }
    CHECK(pairs.vectors.cwiseAbs().maxCoeff() <= std::sqrt(2.0 / n) + 1e-12);
  }
}

TEST_CASE("grid eigenpairs") {
  const auto p22 = grid_eigenpairs(2, 2);
  Eigen::VectorXd sorted = p22.values;
  std::sort(sorted.data(), sorted.data() + 4);
  CHECK(sorted(0) == doctest::Approx(0.0));
  CHECK(sorted(1) == doctest::Approx(2.0));
  CHECK(sorted(2) == doctest::Approx(2.0));
  CHECK(sorted(3) == doctest::Approx(4.0));

  for (int ell : {4, 8}) {
    const Graph g = grid2d(ell, ell);
    const Eigen::MatrixXd lap = dense_laplacian(g);
    const auto pairs = grid_eigenpairs(ell, ell);
    const int n = ell * ell;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r = lap * pairs.vectors.col(i) - pairs.values(i) * pairs.vectors.col(i);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> numeric(lap);
    Eigen::VectorXd vals = pairs.values;
    std::sort(vals.data(), vals.data() + n);
    CHECK((numeric.eigenvalues() - vals).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(pairs.vectors.cwiseAbs().maxCoeff() <= 2.0 / std::sqrt(double(n)) + 1e-12);
    CHECK(incoherence_constant(pairs.vectors, n) <= 2.0 + 1e-12);
  }

  // rectangular grids follow the same Kronecker rule
  const auto rect = grid_eigenpairs(3, 5);
  const Eigen::MatrixXd lap = dense_laplacian(grid2d(3, 5));
  for (int i = 0; i < 15; ++i) {
    const Eigen::VectorXd r = lap * rect.vectors.col(i) - rect.values(i) * rect.vectors.col(i);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("incoherence constant basics") {
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(9, 3);
  CHECK(incoherence_constant(basis, 9) == doctest::Approx(3.0));  // sqrt(9) * 1
  basis(0, 0) = 2.0;
  CHECK_THROWS_AS(incoherence_constant(basis, 9), Error);
}

TEST_CASE("grid DDt eigenvector families") {
  for (int ell : {4, 8}) {
    const auto fam = grid_ddt_eigenvector_families(ell);
    CHECK(fam.vectors.cols() == ell * ell - 1);
    CHECK(fam.max_eigen_residual <= 1e-8);
    CHECK(fam.mu <= 4.0 + 1e-12);
  }
}

TEST_CASE("covering construction") {
  const int n = 100;
  for (int j = 1; j <= 2 * (n - 1); ++j)
    CHECK(covering_radius_fused_lasso(n, j) <= covering_bound(n, j));
  CHECK(covering_radius_fused_lasso(n, 2 * (n - 1)) == doctest::Approx(0.0));
  CHECK(atom_distance_bound_violation(50) <= 1e-12);
  CHECK_THROWS_AS(covering_radius_fused_lasso(n, 0), Error);
  CHECK_THROWS_AS(covering_radius_fused_lasso(n, 2 * n), Error);
}

TEST_CASE("pseudoinverse column-norm scaling") {
  const std::vector<int> sizes{32, 64, 128, 256};
  CHECK(std::abs(pinv_norm_scaling(0, sizes) - 0.5) <= 0.15);
  CHECK(std::abs(pinv_norm_scaling(1, sizes) - 1.5) <= 0.15);
  CHECK(std::abs(pinv_norm_scaling(2, sizes) - 2.5) <= 0.15);
  CHECK_THROWS_AS(pinv_norm_scaling(0, {32, 64}), Error);
}

TEST_CASE("rate sweep smoke") {
  // Small sizes: just exercise the protocol and the decay direction; the
  // spec-scale run (n up to 2048) lives in the acceptance suite.
  const auto r = rate_sweep({16, 32, 64, 128, 256}, 20, 5);
  CHECK(std::isfinite(r.slope));
  CHECK(r.slope < -0.3);
  CHECK(r.mse_by_n.size() == 5);
  const auto r2 = rate_sweep({16, 32, 64, 128, 256}, 20, 5);
  CHECK(r.slope == r2.slope);  // fixed seed reproducibility
  CHECK_THROWS_AS(rate_sweep({16, 32}, 20, 1), Error);
  CHECK_THROWS_AS(rate_sweep({16, 256}, 5, 1), Error);
}

TEST_CASE("single-check suite filter") {
  TheoryOptions opts;
  opts.only_check = "covering";
  opts.covering_n = 40;
  const auto reports = run_theory_suite(opts);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].check == "covering");
  CHECK(reports[0].pass);
}
