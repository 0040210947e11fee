#include "gtf/difference_op.hpp"

#include <cmath>
#include <string>

#include "gtf/dense.hpp"

namespace gtf {

DifferenceOperator::DifferenceOperator(GraphPtr g, int k) : graph_(std::move(g)), k_(k) {
  if (!graph_) fail(ErrorCode::InvalidParameter, "difference operator needs a graph");
  if (k_ < 0) fail(ErrorCode::InvalidParameter, "order k must be >= 0");
  if (k_ % 2 != 0) {
    laplacian_passes_ = (k_ + 1) / 2;
    leading_incidence_ = false;
    rows_ = graph_->num_nodes();
  } else {
    laplacian_passes_ = k_ / 2;
    leading_incidence_ = true;
    rows_ = graph_->num_edges();
  }
}

std::vector<double> DifferenceOperator::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cols())
    fail(ErrorCode::DimensionMismatch, "difference operator apply: expected length " +
                                           std::to_string(cols()));
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> tmp(cur.size());
  for (int pass = 0; pass < laplacian_passes_; ++pass) {
    graph_->apply_laplacian(cur, tmp);  // fused D^T D sweep
    cur.swap(tmp);
  }
  if (!leading_incidence_) return cur;
  std::vector<double> out(graph_->num_edges());
  graph_->apply_incidence(cur, out);
  return out;
}

std::vector<double> DifferenceOperator::apply_transpose(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != rows_)
    fail(ErrorCode::DimensionMismatch, "difference operator apply_transpose: expected length " +
                                           std::to_string(rows_));
  std::vector<double> cur;
  if (leading_incidence_) {
    cur.resize(graph_->num_nodes());
    graph_->apply_incidence_transpose(v, cur);
  } else {
    cur.assign(v.begin(), v.end());
  }
  std::vector<double> tmp(cur.size());
  for (int pass = 0; pass < laplacian_passes_; ++pass) {
    graph_->apply_laplacian(cur, tmp);
    cur.swap(tmp);
  }
  return cur;
}

double DifferenceOperator::penalty(std::span<const double> beta) const {
  double total = 0.0;
  for (double r : apply(beta)) total += std::abs(r);
  return total;
}

Eigen::MatrixXd DifferenceOperator::dense(int max_nodes) const {
  if (cols() > max_nodes)
    fail(ErrorCode::TooLarge, "refusing to densify an operator on " + std::to_string(cols()) +
                                  " nodes (limit " + std::to_string(max_nodes) + ")");
  Eigen::MatrixXd mat(rows_, cols());
  std::vector<double> basis(cols(), 0.0);
  for (int j = 0; j < cols(); ++j) {
    basis[j] = 1.0;
    const auto col = apply(basis);
    for (int i = 0; i < rows_; ++i) mat(i, j) = col[i];
    basis[j] = 0.0;
  }
  return mat;
}

double elementwise_penalty(const Graph& g, int k, std::span<const double> beta) {
  if (static_cast<int>(beta.size()) != g.num_nodes())
    fail(ErrorCode::DimensionMismatch, "elementwise_penalty: signal length mismatch");
  if (k < 0 || k > 2) fail(ErrorCode::UnsupportedOrder, "elementwise penalty printed only for k in {0,1,2}");
  if (!g.unit_weights())
    fail(ErrorCode::WeightedGraph, "elementwise penalty formulas assume unit weights");

  if (k == 0) {
    double total = 0.0;
    for (const auto& e : g.edges()) total += std::abs(beta[e.i] - beta[e.j]);
    return total;
  }

  // Node term n_i (beta_i - average of neighbors), shared by k=1 and k=2.
  std::vector<double> node_term(g.num_nodes(), 0.0);
  for (int v = 0; v < g.num_nodes(); ++v) {
    const int deg = g.degree(v);
    if (deg == 0) continue;
    double nbr_sum = 0.0;
    for (const auto& inc : g.incident(v)) nbr_sum += beta[inc.neighbor];
    node_term[v] = deg * (beta[v] - nbr_sum / deg);
  }
  if (k == 1) {
    double total = 0.0;
    for (double t : node_term) total += std::abs(t);
    return total;
  }
  double total = 0.0;
  for (const auto& e : g.edges()) total += std::abs(node_term[e.i] - node_term[e.j]);
  return total;
}

Eigen::MatrixXd univariate_difference_operator(int n, int k) {
  if (k < 0 || n < k + 2)
    fail(ErrorCode::InvalidParameter, "univariate operator needs n >= k+2");
  auto first_difference = [](int rows) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, rows + 1);
    for (int i = 0; i < rows; ++i) {
      d(i, i) = -1.0;
      d(i, i + 1) = 1.0;
    }
    return d;
  };
  Eigen::MatrixXd op = first_difference(n - 1);
  for (int order = 1; order <= k; ++order) op = first_difference(n - order - 1) * op;
  return op;
}

namespace {

void require_unit_chain(const Graph& g) {
  if (g.num_edges() != g.num_nodes() - 1)
    fail(ErrorCode::NotAChain, "boundary_trim expects a chain graph");
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    if (edge.i != e || edge.j != e + 1 || edge.w != 1.0)
      fail(ErrorCode::NotAChain, "boundary_trim expects the unit-weight chain 0-1-...-(n-1)");
  }
}

}  // namespace

std::vector<int> boundary_trim(const Graph& g, int k) {
  require_unit_chain(g);
  if (k < 0) fail(ErrorCode::InvalidParameter, "order k must be >= 0");
  const int rows = k % 2 != 0 ? g.num_nodes() : g.num_edges();
  const int trim = k % 2 != 0 ? (k + 1) / 2 : k / 2;
  if (rows < 2 * trim + 1) fail(ErrorCode::InvalidParameter, "chain too short for this order");
  std::vector<int> out;
  for (int i = 0; i < trim; ++i) out.push_back(i);
  for (int i = rows - trim; i < rows; ++i) out.push_back(i);
  return out;
}

int chain_reduction_sign(int k) { return ((k + 1) / 2) % 2 == 0 ? 1 : -1; }

double max_column_norm_pinv(const Eigen::MatrixXd& op) {
  const Eigen::MatrixXd pinv = pseudoinverse(op);
  double best = 0.0;
  for (Eigen::Index j = 0; j < pinv.cols(); ++j) best = std::max(best, pinv.col(j).norm());
  return best;
}

namespace {

// Min-norm least-squares solution of op x = e_j by CGLS (started at zero,
// iterates stay in row(op), so the limit is the pseudoinverse column).
double pinv_column_norm_iterative(const DifferenceOperator& op, int j) {
  const int r = op.rows();
  std::vector<double> e(r, 0.0);
  e[j] = 1.0;
  std::vector<double> x(op.cols(), 0.0);
  std::vector<double> residual = e;                  // e - op x
  std::vector<double> s = op.apply_transpose(residual);  // op^T residual
  std::vector<double> p = s;
  double gamma = 0.0;
  for (double v : s) gamma += v * v;
  const double gamma0 = gamma;
  const int max_iter = 20 * (op.cols() + r);
  for (int it = 0; it < max_iter && gamma > 1e-24 * std::max(gamma0, 1.0); ++it) {
    const auto q = op.apply(p);
    double qq = 0.0;
    for (double v : q) qq += v * v;
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    for (size_t t = 0; t < x.size(); ++t) x[t] += alpha * p[t];
    for (size_t t = 0; t < residual.size(); ++t) residual[t] -= alpha * q[t];
    s = op.apply_transpose(residual);
    double gamma_new = 0.0;
    for (double v : s) gamma_new += v * v;
    const double beta = gamma_new / gamma;
    gamma = gamma_new;
    for (size_t t = 0; t < p.size(); ++t) p[t] = s[t] + beta * p[t];
  }
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  return std::sqrt(norm2);
}

}  // namespace

double max_column_norm_pinv(const DifferenceOperator& op, bool allow_large, int max_nodes) {
  if (op.cols() <= max_nodes) return max_column_norm_pinv(op.dense(max_nodes));
  if (!allow_large)
    fail(ErrorCode::TooLarge, "dense pseudoinverse path refused above " + std::to_string(max_nodes) +
                                  " nodes; request the iterative path explicitly");
  double best = 0.0;
  for (int j = 0; j < op.rows(); ++j) best = std::max(best, pinv_column_norm_iterative(op, j));
  return best;
}

}  // namespace gtf
