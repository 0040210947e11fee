#include "gtf/dense.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gtf {

Eigen::MatrixXd dense_incidence(const Graph& g) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(g.num_edges(), g.num_nodes());
  for (int e = 0; e < g.num_edges(); ++e) {
    d(e, g.edge(e).i) = -g.edge(e).w;
    d(e, g.edge(e).j) = g.edge(e).w;
  }
  return d;
}

Eigen::MatrixXd dense_laplacian(const Graph& g) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) {
    const double w2 = e.w * e.w;
    lap(e.i, e.i) += w2;
    lap(e.j, e.j) += w2;
    lap(e.i, e.j) -= w2;
    lap(e.j, e.i) -= w2;
  }
  return lap;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rank_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rank_tol * sv(0) : 0.0;
  Eigen::VectorXd inv = sv;
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd laplacian_pinv_power(const Eigen::MatrixXd& lap, int q, double rank_tol) {
  if (q == 0) return Eigen::MatrixXd::Identity(lap.rows(), lap.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  const auto& vals = eig.eigenvalues();
  const double cutoff = rank_tol * std::max(vals.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd inv = vals;
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = vals(i) > cutoff ? std::pow(1.0 / vals(i), q) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double span_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& x) {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  // SVD rather than plain QR: the null-space bases here are often rank
  // deficient (the all-ones vector lies in the indicator span for k=0), and
  // an unpivoted Q would project onto spurious directions.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-12 * sv(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
  const Eigen::VectorXd resid = x - u * (u.transpose() * x);
  return resid.norm() / nx;
}

}  // namespace gtf
