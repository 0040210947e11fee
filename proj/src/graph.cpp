#include "gtf/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "gtf/rng.hpp"

namespace gtf {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) fail(ErrorCode::InvalidParameter, "graph needs at least one node");
  for (auto& e : edges_) {
    if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= n_)
      fail(ErrorCode::IndexOutOfRange, "edge endpoint out of range");
    if (e.i == e.j) fail(ErrorCode::SelfLoop, "self-loops are not allowed");
    if (!(e.w > 0.0)) fail(ErrorCode::InvalidParameter, "edge weights must be strictly positive");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (size_t e = 1; e < edges_.size(); ++e)
    if (edges_[e].i == edges_[e - 1].i && edges_[e].j == edges_[e - 1].j)
      fail(ErrorCode::DuplicateEdge, "duplicate undirected edge {" + std::to_string(edges_[e].i) +
                                         "," + std::to_string(edges_[e].j) + "}");

  adj_offset_.assign(static_cast<size_t>(n_) + 1, 0);
  for (const auto& e : edges_) {
    ++adj_offset_[e.i + 1];
    ++adj_offset_[e.j + 1];
  }
  for (int v = 0; v < n_; ++v) adj_offset_[v + 1] += adj_offset_[v];
  adj_.resize(static_cast<size_t>(2) * edges_.size());
  std::vector<int> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
  for (int e = 0; e < num_edges(); ++e) {
    adj_[cursor[edges_[e].i]++] = {edges_[e].j, e};
    adj_[cursor[edges_[e].j]++] = {edges_[e].i, e};
  }

  lap_diag_.assign(n_, 0.0);
  for (const auto& e : edges_) {
    lap_diag_[e.i] += e.w * e.w;
    lap_diag_[e.j] += e.w * e.w;
    if (e.w != 1.0) unit_weights_ = false;
  }
}

void Graph::apply_incidence(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != n_ || out.size() != edges_.size())
    fail(ErrorCode::DimensionMismatch, "apply_incidence: bad dimensions");
  for (int e = 0; e < num_edges(); ++e) out[e] = edges_[e].w * (x[edges_[e].j] - x[edges_[e].i]);
}

void Graph::apply_incidence_transpose(std::span<const double> v, std::span<double> out) const {
  if (v.size() != edges_.size() || static_cast<int>(out.size()) != n_)
    fail(ErrorCode::DimensionMismatch, "apply_incidence_transpose: bad dimensions");
  std::fill(out.begin(), out.end(), 0.0);
  for (int e = 0; e < num_edges(); ++e) {
    out[edges_[e].i] -= edges_[e].w * v[e];
    out[edges_[e].j] += edges_[e].w * v[e];
  }
}

void Graph::apply_laplacian(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(out.size()) != n_)
    fail(ErrorCode::DimensionMismatch, "apply_laplacian: bad dimensions");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : edges_) {
    const double d = e.w * e.w * (x[e.j] - x[e.i]);
    out[e.i] -= d;
    out[e.j] += d;
  }
}

std::vector<double> Graph::incidence(std::span<const double> x) const {
  std::vector<double> out(edges_.size());
  apply_incidence(x, out);
  return out;
}

std::vector<double> Graph::incidence_transpose(std::span<const double> v) const {
  std::vector<double> out(n_);
  apply_incidence_transpose(v, out);
  return out;
}

std::vector<double> Graph::laplacian(std::span<const double> x) const {
  std::vector<double> out(n_);
  apply_laplacian(x, out);
  return out;
}

Graph build_graph(int n, std::vector<Edge> edges) { return Graph(n, std::move(edges)); }

GraphPtr make_graph(int n, std::vector<Edge> edges) {
  return std::make_shared<const Graph>(n, std::move(edges));
}

ComponentLabeling connected_components(const Graph& g, std::span<const int> excluded_edges) {
  std::vector<char> excluded(g.num_edges(), 0);
  for (int e : excluded_edges) {
    if (e < 0 || e >= g.num_edges()) fail(ErrorCode::IndexOutOfRange, "excluded edge index out of range");
    excluded[e] = 1;
  }
  ComponentLabeling out;
  out.labels.assign(g.num_nodes(), -1);
  std::queue<int> frontier;
  for (int root = 0; root < g.num_nodes(); ++root) {
    if (out.labels[root] >= 0) continue;
    const int id = out.count++;
    out.labels[root] = id;
    frontier.push(root);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (const auto& inc : g.incident(v)) {
        if (excluded[inc.edge] || out.labels[inc.neighbor] >= 0) continue;
        out.labels[inc.neighbor] = id;
        frontier.push(inc.neighbor);
      }
    }
  }
  return out;
}

Graph chain(int n) {
  if (n < 1) fail(ErrorCode::InvalidParameter, "chain needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(n > 0 ? n - 1 : 0);
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph(n, std::move(edges));
}

Graph grid2d(int rows, int cols) {
  if (rows < 1 || cols < 1) fail(ErrorCode::InvalidParameter, "grid2d needs rows, cols >= 1");
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(rows) * (cols - 1) + static_cast<size_t>(cols) * (rows - 1));
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  return Graph(rows * cols, std::move(edges));
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 1 || !(p > 0.0) || p > 1.0) fail(ErrorCode::InvalidParameter, "erdos_renyi needs n >= 1, 0 < p <= 1");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

Graph knn_graph(const std::vector<std::vector<double>>& points, int k) {
  const int n = static_cast<int>(points.size());
  if (n < 2) fail(ErrorCode::InvalidParameter, "knn_graph needs at least two points");
  if (k < 1 || k >= n) fail(ErrorCode::InvalidParameter, "knn_graph needs 1 <= k < #points");
  const size_t dim = points[0].size();
  for (const auto& pt : points)
    if (pt.size() != dim) fail(ErrorCode::DimensionMismatch, "knn_graph: ragged point list");

  std::vector<std::pair<int, int>> pairs;
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (size_t t = 0; t < dim; ++t) {
        const double d = points[i][t] - points[j][t];
        d2 += d * d;
      }
      dist[j] = {d2, j};
    }
    dist[i].first = std::numeric_limits<double>::infinity();  // never self
    std::sort(dist.begin(), dist.end());                      // ties broken by index
    for (int t = 0; t < k; ++t) {
      const int j = dist[t].second;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

std::vector<std::vector<double>> grid2d_coordinates(int rows, int cols) {
  std::vector<std::vector<double>> coords;
  coords.reserve(static_cast<size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) coords.push_back({static_cast<double>(r), static_cast<double>(c)});
  return coords;
}

namespace {

std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

}  // namespace

void write_edge_list(const Graph& g, std::ostream& os) {
  os << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const auto& e : g.edges()) {
    os << e.i << ' ' << e.j;
    if (e.w != 1.0) os << ' ' << format_weight(e.w);
    os << '\n';
  }
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) fail(ErrorCode::ParseError, "edge list: empty input");
  std::istringstream head(line);
  int n = 0, m = 0;
  if (!(head >> n >> m))
    fail(ErrorCode::ParseError, "edge list line " + std::to_string(lineno) + ": expected 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (int e = 0; e < m; ++e) {
    if (!next_line())
      fail(ErrorCode::ParseError, "edge list: expected " + std::to_string(m) + " edges, got " +
                                      std::to_string(e));
    std::istringstream row(line);
    Edge edge;
    if (!(row >> edge.i >> edge.j))
      fail(ErrorCode::ParseError, "edge list line " + std::to_string(lineno) + ": expected 'i j [w]'");
    if (!(row >> edge.w)) edge.w = 1.0;
    std::string trailing;
    if (row >> trailing)
      fail(ErrorCode::ParseError, "edge list line " + std::to_string(lineno) + ": trailing tokens");
    edges.push_back(edge);
  }
  return Graph(n, std::move(edges));
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::FileNotFound, "cannot open for writing: " + path);
  write_edge_list(g, os);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::FileNotFound, "cannot open: " + path);
  return read_edge_list(is);
}

}  // namespace gtf
