#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gtf/graph.hpp"
#include "gtf/solvers.hpp"

namespace gtf {

/// Multi-class transductive problem: indicator matrix Y (one-hot on the
/// observed rows), observed set O, prior weights R, ridge epsilon > 0
/// (strict convexity), GTF penalty of order k with multiplier lambda.
struct MadProblem {
  GraphPtr graph;
  int num_classes = 0;
  Eigen::MatrixXd Y;
  std::vector<int> observed;
  Eigen::MatrixXd R;
  double epsilon = 0.01;
  double lambda = 0.0;
  int k = 0;
};

/// Builds the standard experimental setup: one-hot Y from
/// observed labels, uniform prior R = 1/K.
MadProblem make_mad_problem(GraphPtr graph, int num_classes, const std::vector<int>& observed_nodes,
                            const std::vector<int>& observed_labels, double lambda, int k,
                            double epsilon = 0.01);

struct MadFit {
  Eigen::MatrixXd B;        // fitted relative probabilities, n x K
  std::vector<int> labels;  // argmax per node (observed nodes keep their label)
  std::vector<int> iterations_per_class;
  std::vector<bool> converged_per_class;
  std::vector<double> kkt_residual_per_class;
};

/// MAD-GTF: per class j solves
///   min_Bj sum_{i in O} (Y_ij - B_ij)^2 + lambda ||Delta^(k+1) B_j||_1
///          + epsilon ||R_j - B_j||^2
/// via the weighted-loss ADMM (columns are independent).
MadFit mad_gtf(const MadProblem& p, const SolverOptions& opts = {});

/// Baseline with the l1 term replaced by the Laplacian quadratic form
/// B_j^T L B_j; per-column linear solve by PCG.
MadFit mad_laplacian(const MadProblem& p, const SolverOptions& opts = {});

/// Imputation rule: class with the largest fitted value, ties broken by
/// lowest class index; observed nodes keep the observed label.
std::vector<int> impute_labels(const Eigen::MatrixXd& B, const std::vector<int>& observed,
                               const std::vector<int>& observed_labels);

double misclassification_rate(const std::vector<int>& predicted, const std::vector<int>& truth,
                              const std::vector<int>& evaluation_set);

}  // namespace gtf
