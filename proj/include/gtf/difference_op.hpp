#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "gtf/graph.hpp"

namespace gtf {

/// Graph difference operator of order k+1, kept in factored form as a
/// chain of incidence / transposed-incidence stages:
///   k=0: D,  k=1: D^T D = L,  k=2: D L,  k=3: L^2, ...
/// equivalently L^((k+1)/2) for odd k and D L^(k/2) for even k. apply()
/// never materializes the matrix, so it is usable at any graph size.
/// Immutable and safe to share across threads.
class DifferenceOperator {
 public:
  DifferenceOperator(GraphPtr g, int k);

  int order() const { return k_; }
  bool odd_order() const { return k_ % 2 != 0; }
  int rows() const { return rows_; }
  int cols() const { return graph_->num_nodes(); }
  const Graph& graph() const { return *graph_; }
  GraphPtr graph_ptr() const { return graph_; }

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> v) const;

  /// ||Delta^{k+1} beta||_1
  double penalty(std::span<const double> beta) const;

  /// Dense materialization (columns via apply on basis vectors); refuses
  /// graphs with more than `max_nodes` nodes.
  Eigen::MatrixXd dense(int max_nodes = 2000) const;

 private:
  GraphPtr graph_;
  int k_;
  int rows_;
  int laplacian_passes_;  // q: number of L stages before the optional D
  bool leading_incidence_;
};

inline DifferenceOperator graph_difference_operator(GraphPtr g, int k) {
  return DifferenceOperator(std::move(g), k);
}

/// Fig.-2 style elementwise penalty formulas for unit-weight graphs,
/// k in {0,1,2}. Equals the operator penalty for the same order.
double elementwise_penalty(const Graph& g, int k, std::span<const double> beta);

/// Univariate difference operator D^(k+1), size (n-k-1) x n, built by the
/// recursion D^(k+1) = D^(1) D^(k).
Eigen::MatrixXd univariate_difference_operator(int n, int k);

/// For a chain graph: rows of Delta^(k+1) whose removal leaves the
/// univariate D^(k+1) (first/last k/2 rows for even k, first/last (k+1)/2
/// for odd k). The surviving rows match D^(k+1) up to the global sign
/// (-1)^ceil(k/2) inherited from the recursion; chain_reduction_sign()
/// reports it.
std::vector<int> boundary_trim(const Graph& g, int k);
int chain_reduction_sign(int k);

/// M = max_j ||Delta^dagger e_j||_2 over columns of the pseudoinverse,
/// dense SVD path (TooLarge beyond max_nodes unless allow_large, which
/// switches to a per-column iterative least-squares path).
double max_column_norm_pinv(const DifferenceOperator& op, bool allow_large = false,
                            int max_nodes = 500);
double max_column_norm_pinv(const Eigen::MatrixXd& op);

}  // namespace gtf
