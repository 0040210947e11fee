#include "gtf/transduction.hpp"

#include <algorithm>
#include <cmath>

#include "gtf/difference_op.hpp"
#include "gtf/pcg.hpp"

namespace gtf {

namespace {

void validate(const MadProblem& p) {
  if (!p.graph) fail(ErrorCode::InvalidParameter, "MadProblem needs a graph");
  const int n = p.graph->num_nodes();
  if (p.num_classes < 1) fail(ErrorCode::InvalidParameter, "MadProblem needs at least one class");
  if (p.Y.rows() != n || p.Y.cols() != p.num_classes || p.R.rows() != n || p.R.cols() != p.num_classes)
    fail(ErrorCode::DimensionMismatch, "MadProblem: Y and R must be n x K");
  if (!(p.epsilon > 0.0))
    fail(ErrorCode::InvalidParameter, "MadProblem needs epsilon > 0 (strict convexity)");
  if (p.lambda < 0.0) fail(ErrorCode::InvalidParameter, "MadProblem needs lambda >= 0");
  if (p.k < 0) fail(ErrorCode::InvalidParameter, "MadProblem needs k >= 0");
  for (int i : p.observed)
    if (i < 0 || i >= n) fail(ErrorCode::IndexOutOfRange, "observed node out of range");
}

std::vector<int> observed_labels_from_y(const MadProblem& p) {
  std::vector<int> labels(p.observed.size());
  for (size_t t = 0; t < p.observed.size(); ++t) {
    int best = 0;
    for (int j = 1; j < p.num_classes; ++j)
      if (p.Y(p.observed[t], j) > p.Y(p.observed[t], best)) best = j;
    labels[t] = best;
  }
  return labels;
}

}  // namespace

MadProblem make_mad_problem(GraphPtr graph, int num_classes, const std::vector<int>& observed_nodes,
                            const std::vector<int>& observed_labels, double lambda, int k,
                            double epsilon) {
  if (!graph) fail(ErrorCode::InvalidParameter, "make_mad_problem needs a graph");
  if (observed_nodes.size() != observed_labels.size())
    fail(ErrorCode::DimensionMismatch, "observed nodes/labels length mismatch");
  MadProblem p;
  p.graph = std::move(graph);
  p.num_classes = num_classes;
  const int n = p.graph->num_nodes();
  p.Y = Eigen::MatrixXd::Zero(n, num_classes);
  for (size_t t = 0; t < observed_nodes.size(); ++t) {
    if (observed_nodes[t] < 0 || observed_nodes[t] >= n)
      fail(ErrorCode::IndexOutOfRange, "observed node out of range");
    if (observed_labels[t] < 0 || observed_labels[t] >= num_classes)
      fail(ErrorCode::IndexOutOfRange, "observed label out of range");
    p.Y(observed_nodes[t], observed_labels[t]) = 1.0;
  }
  p.observed = observed_nodes;
  p.R = Eigen::MatrixXd::Constant(n, num_classes, 1.0 / num_classes);
  p.epsilon = epsilon;
  p.lambda = lambda;
  p.k = k;
  return p;
}

MadFit mad_gtf(const MadProblem& p, const SolverOptions& opts) {
  validate(p);
  const int n = p.graph->num_nodes();
  std::vector<char> is_observed(n, 0);
  for (int i : p.observed) is_observed[i] = 1;

  MadFit fit;
  fit.B.resize(n, p.num_classes);
  DifferenceOperator op(p.graph, p.k);
  for (int j = 0; j < p.num_classes; ++j) {
    QuadraticLoss loss;
    loss.a_diag.resize(n);
    loss.c.resize(n);
    for (int i = 0; i < n; ++i) {
      loss.a_diag[i] = 2.0 * (is_observed[i] ? 1.0 : 0.0) + 2.0 * p.epsilon;
      loss.c[i] = 2.0 * (is_observed[i] ? p.Y(i, j) : 0.0) + 2.0 * p.epsilon * p.R(i, j);
    }
    const GtfFit column = admm_quadratic(loss, p.graph, p.k, p.lambda, opts);
    for (int i = 0; i < n; ++i) fit.B(i, j) = column.beta[i];
    fit.iterations_per_class.push_back(column.iterations);
    fit.converged_per_class.push_back(column.converged);
    // KKT residual ||A beta - c + Delta^T v||_inf of the column problem.
    double kkt = 0.0;
    if (static_cast<int>(column.dual.size()) == op.rows()) {
      const auto atv = op.apply_transpose(column.dual);
      for (int i = 0; i < n; ++i)
        kkt = std::max(kkt, std::abs(loss.a_diag[i] * column.beta[i] - loss.c[i] + atv[i]));
    }
    fit.kkt_residual_per_class.push_back(kkt);
  }
  fit.labels = impute_labels(fit.B, p.observed, observed_labels_from_y(p));
  return fit;
}

MadFit mad_laplacian(const MadProblem& p, const SolverOptions& opts) {
  validate(p);
  const int n = p.graph->num_nodes();
  std::vector<char> is_observed(n, 0);
  for (int i : p.observed) is_observed[i] = 1;

  // Per column: (diag(1_O + eps) + lambda L) B_j = 1_O Y_j + eps R_j.
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i)
    diag[i] = (is_observed[i] ? 1.0 : 0.0) + p.epsilon + p.lambda * p.graph->laplacian_diagonal()[i];
  auto apply = [&](std::span<const double> x, std::span<double> out) {
    p.graph->apply_laplacian(x, out);
    for (int i = 0; i < n; ++i)
      out[i] = ((is_observed[i] ? 1.0 : 0.0) + p.epsilon) * x[i] + p.lambda * out[i];
  };

  MadFit fit;
  fit.B.resize(n, p.num_classes);
  for (int j = 0; j < p.num_classes; ++j) {
    std::vector<double> rhs(n), x(n, 0.0);
    for (int i = 0; i < n; ++i)
      rhs[i] = (is_observed[i] ? p.Y(i, j) : 0.0) + p.epsilon * p.R(i, j);
    const auto cg = pcg(apply, diag, rhs, x, opts.cg_tolerance, std::max(1000, 40 * n));
    for (int i = 0; i < n; ++i) fit.B(i, j) = x[i];
    fit.iterations_per_class.push_back(cg.iterations);
    fit.converged_per_class.push_back(cg.converged);
    fit.kkt_residual_per_class.push_back(cg.relative_residual);
  }
  fit.labels = impute_labels(fit.B, p.observed, observed_labels_from_y(p));
  return fit;
}

std::vector<int> impute_labels(const Eigen::MatrixXd& B, const std::vector<int>& observed,
                               const std::vector<int>& observed_labels) {
  if (observed.size() != observed_labels.size())
    fail(ErrorCode::DimensionMismatch, "impute_labels: observed nodes/labels length mismatch");
  std::vector<int> labels(B.rows());
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < B.cols(); ++j)
      if (B(i, j) > B(i, best)) best = static_cast<int>(j);  // ties keep the lowest index
    labels[i] = best;
  }
  for (size_t t = 0; t < observed.size(); ++t) labels[observed[t]] = observed_labels[t];
  return labels;
}

double misclassification_rate(const std::vector<int>& predicted, const std::vector<int>& truth,
                              const std::vector<int>& evaluation_set) {
  if (predicted.size() != truth.size())
    fail(ErrorCode::DimensionMismatch, "misclassification_rate: label vectors must align");
  if (evaluation_set.empty()) fail(ErrorCode::InvalidParameter, "empty evaluation set");
  int wrong = 0;
  for (int i : evaluation_set) {
    if (i < 0 || i >= static_cast<int>(predicted.size()))
      fail(ErrorCode::IndexOutOfRange, "evaluation node out of range");
    if (predicted[i] != truth[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(evaluation_set.size());
}

}  // namespace gtf
