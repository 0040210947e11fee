#pragma once

#include <span>
#include <vector>

#include "gtf/graph.hpp"

namespace gtf {

/// Directed capacitated network with residual state. One instance per
/// thread; max_flow mutates the residual capacities in place.
/// Arcs are scanned in insertion order, so a fixed construction order
/// makes the search (and the returned cut) bit-reproducible.
class FlowNetwork {
 public:
  explicit FlowNetwork(int num_nodes);

  int num_nodes() const { return static_cast<int>(adjacency_.size()); }
  /// Adds the residual arc pair (from->to cap, to->from rev_cap); returns
  /// the forward arc id.
  int add_arc(int from, int to, double cap, double rev_cap = 0.0);

  /// Boykov-Kolmogorov style search-tree max-flow. Returns the flow value;
  /// afterwards on_source_side() exposes the minimal min cut (residual
  /// reachability from the source).
  double max_flow(int source, int sink);

  bool on_source_side(int v) const { return source_side_[v] != 0; }
  /// Net flow pushed through a forward arc id (can be negative if the
  /// reverse direction carried more).
  double net_flow(int arc_id) const;
  double residual_capacity(int arc_id) const { return arcs_[arc_id].cap; }

 private:
  struct Arc {
    int head;
    double cap;  // residual
  };
  int tail(int a) const { return arcs_[a ^ 1].head; }

  bool has_valid_origin(int v, int terminal);

  std::vector<Arc> arcs_;
  std::vector<double> initial_cap_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<signed char> label_;
  std::vector<int> parent_arc_;
  std::vector<int> origin_stamp_;
  std::vector<int> scan_cursor_;
  int origin_time_ = 0;
  std::vector<char> source_side_;
};

struct TvResult {
  std::vector<double> x;
  /// Edge duals with respect to the unweighted incidence rows:
  /// x = b - Dbar^T duals, |dual_e| <= w * w_e, and dual_e = -+ (w*w_e) on
  /// edges where x_i != x_j (sign opposite to x_j - x_i for row i<j).
  std::vector<double> duals;
  bool used_fallback = false;
};

struct TvOptions {
  int max_depth = 64;           // recursion bound before first-order fallback
  double fallback_gap_tol = 1e-13;
  int fallback_max_sweeps = 2000000;
  /// When false, skips the per-block dual feasibility flows: x is exact but
  /// only cut-edge duals are filled. Used by ADMM inner iterations, which
  /// need duals from the final prox only.
  bool extract_duals = true;
};

/// Exact graph TV denoising (graph fused lasso):
///   min_x 1/2 ||b - x||^2 + w * sum_{(i,j) in E} w_ij |x_i - x_j|
/// by divide-and-conquer parametric max-flow, with a KKT certificate
/// (primal + edge duals) extracted from the terminal cuts.
TvResult tv_denoise_certified(const Graph& g, std::span<const double> b, double w,
                              const TvOptions& options = {});
std::vector<double> tv_denoise(const Graph& g, std::span<const double> b, double w);

/// First-order reference solver for the same problem: cyclic exact
/// coordinate minimization on the box-constrained dual, stopped on the
/// primal-dual gap. Serves as the independent oracle for the parametric
/// solver and as its fallback on pathological instances.
TvResult tv_denoise_reference(const Graph& g, std::span<const double> b, double w,
                              double gap_tol = 1e-12, int max_sweeps = 1000000);

}  // namespace gtf
