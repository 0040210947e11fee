#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "gtf/graph.hpp"

namespace gtf {

// Dense companions to the sparse operator paths. These back the oracles,
// theory checks and pseudoinverse-derived quantities; they are only meant
// for desk-scale n (callers enforce their own limits).

Eigen::MatrixXd dense_incidence(const Graph& g);
Eigen::MatrixXd dense_laplacian(const Graph& g);

/// Moore-Penrose pseudoinverse via SVD; singular values <= rank_tol * max
/// are treated as zero.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rank_tol = 1e-10);

/// (L^dagger)^q b for symmetric PSD L, via a single symmetric
/// eigendecomposition (eigenvalues <= rank_tol * max treated as null).
Eigen::MatrixXd laplacian_pinv_power(const Eigen::MatrixXd& lap, int q, double rank_tol = 1e-10);

/// Relative distance of x from the column span of `basis`:
/// ||x - P x|| / ||x|| (0 when x is zero).
double span_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& x);

inline Eigen::VectorXd to_eigen(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline std::vector<double> from_eigen(const Eigen::VectorXd& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace gtf
