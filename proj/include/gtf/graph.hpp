#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "gtf/errors.hpp"

namespace gtf {

struct Edge {
  int i = 0;
  int j = 0;
  double w = 1.0;
};

/// Immutable weighted undirected graph. Edges are canonicalized on
/// construction (i < j, sorted lexicographically, no duplicates, no
/// self-loops, strictly positive weights); safe for concurrent reads.
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<size_t>(e)]; }

  /// Number of incident edges of node v (unweighted degree n_v).
  int degree(int v) const { return adj_offset_[v + 1] - adj_offset_[v]; }

  struct Incidence {
    int neighbor;
    int edge;
  };
  std::span<const Incidence> incident(int v) const {
    return {adj_.data() + adj_offset_[v], adj_.data() + adj_offset_[v + 1]};
  }

  bool unit_weights() const { return unit_weights_; }

  // y = D x  (m rows; row e=(i,j): w_e * (x_j - x_i))
  void apply_incidence(std::span<const double> x, std::span<double> out) const;
  // y = D^T v
  void apply_incidence_transpose(std::span<const double> v, std::span<double> out) const;
  // y = L x with L = D^T D, applied in one pass over edges.
  void apply_laplacian(std::span<const double> x, std::span<double> out) const;

  std::vector<double> incidence(std::span<const double> x) const;
  std::vector<double> incidence_transpose(std::span<const double> v) const;
  std::vector<double> laplacian(std::span<const double> x) const;

  /// diag(L)_v = sum of w_e^2 over edges at v.
  const std::vector<double>& laplacian_diagonal() const { return lap_diag_; }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<int> adj_offset_;
  std::vector<Incidence> adj_;
  std::vector<double> lap_diag_;
  bool unit_weights_ = true;
};

using GraphPtr = std::shared_ptr<const Graph>;

/// Validates and canonicalizes an edge list. Throws IndexOutOfRange,
/// SelfLoop or DuplicateEdge (duplicates are rejected even when the
/// weights differ).
Graph build_graph(int n, std::vector<Edge> edges);
GraphPtr make_graph(int n, std::vector<Edge> edges);

struct ComponentLabeling {
  std::vector<int> labels;  // node -> component id, ids 0..count-1
  int count = 0;
};

/// Connected components of G_{-A}, the graph with the edges indexed by
/// `excluded_edges` removed. Component ids are assigned by smallest
/// contained node (BFS from node 0 upward), so the labeling is deterministic.
ComponentLabeling connected_components(const Graph& g, std::span<const int> excluded_edges = {});

Graph chain(int n);
Graph grid2d(int rows, int cols);
Graph erdos_renyi(int n, double p, std::uint64_t seed);
/// Symmetrized k-nearest-neighbor graph: edge {i,j} present when either
/// point lists the other among its k nearest (Euclidean), ties by index.
Graph knn_graph(const std::vector<std::vector<double>>& points, int k);

/// Row/col coordinates of grid2d nodes, row-major, as 2d points.
std::vector<std::vector<double>> grid2d_coordinates(int rows, int cols);

// Edge-list text format: first line "n m", then one line "i j w" per edge
// (0-based; w omitted on write only when exactly 1). Weights round-trip
// via max-precision decimal.
void write_edge_list(const Graph& g, std::ostream& os);
Graph read_edge_list(std::istream& is);
void write_edge_list_file(const Graph& g, const std::string& path);
Graph read_edge_list_file(const std::string& path);

}  // namespace gtf
