#include "gtf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace gtf {

FlowNetwork::FlowNetwork(int num_nodes) : adjacency_(num_nodes) {
  if (num_nodes < 2) fail(ErrorCode::InvalidParameter, "flow network needs at least two nodes");
}

int FlowNetwork::add_arc(int from, int to, double cap, double rev_cap) {
  if (from < 0 || from >= num_nodes() || to < 0 || to >= num_nodes())
    fail(ErrorCode::IndexOutOfRange, "arc endpoint out of range");
  if (from == to) fail(ErrorCode::SelfLoop, "self-arcs are not allowed");
  if (cap < 0.0 || rev_cap < 0.0) fail(ErrorCode::InvalidParameter, "arc capacities must be >= 0");
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, cap});
  arcs_.push_back({from, rev_cap});
  initial_cap_.push_back(cap);
  initial_cap_.push_back(rev_cap);
  adjacency_[from].push_back(id);
  adjacency_[to].push_back(id + 1);
  return id;
}

double FlowNetwork::net_flow(int arc_id) const { return initial_cap_[arc_id] - arcs_[arc_id].cap; }

bool FlowNetwork::has_valid_origin(int v, int terminal) {
  // Walk the parent chain; orphaned subtrees have a -1 parent before the
  // terminal and are not valid adoption targets. Nodes validated under the
  // current timestamp short-circuit the walk (the standard BK TIME/DIST
  // device); stale marks resolve through orphan propagation.
  int u = v;
  while (u != terminal && origin_stamp_[u] != origin_time_) {
    const int pa = parent_arc_[u];
    if (pa < 0) return false;
    u = label_[u] > 0 ? tail(pa) : arcs_[pa].head;
  }
  u = v;
  while (u != terminal && origin_stamp_[u] != origin_time_) {
    origin_stamp_[u] = origin_time_;
    const int pa = parent_arc_[u];
    u = label_[u] > 0 ? tail(pa) : arcs_[pa].head;
  }
  return true;
}

double FlowNetwork::max_flow(int source, int sink) {
  constexpr signed char kFree = 0, kSource = 1, kSink = -1;
  const int n = num_nodes();
  if (source == sink) fail(ErrorCode::InvalidParameter, "source and sink must differ");
  label_.assign(n, kFree);
  parent_arc_.assign(n, -1);
  origin_stamp_.assign(n, 0);
  origin_time_ = 1;
  scan_cursor_.assign(n, 0);
  label_[source] = kSource;
  label_[sink] = kSink;
  std::deque<int> active{source, sink};
  std::deque<int> orphans;
  double total = 0.0;
  auto activate = [&](int v) {
    scan_cursor_[v] = 0;
    active.push_back(v);
  };

  auto adopt_all = [&]() {
    while (!orphans.empty()) {
      const int o = orphans.front();
      orphans.pop_front();
      const signed char side = label_[o];
      bool adopted = false;
      for (int a : adjacency_[o]) {
        const int q = arcs_[a].head;
        if (label_[q] != side) continue;
        // For the source tree the candidate parent arc is q->o; for the
        // sink tree it is o->q.
        const int pa = side == kSource ? (a ^ 1) : a;
        if (arcs_[pa].cap <= 0.0) continue;
        const int terminal = side == kSource ? source : sink;
        if (!has_valid_origin(q, terminal)) continue;
        parent_arc_[o] = pa;
        adopted = true;
        break;
      }
      if (adopted) continue;
      for (int a : adjacency_[o]) {
        const int q = arcs_[a].head;
        if (label_[q] != side) continue;
        const int pa = side == kSource ? (a ^ 1) : a;
        if (arcs_[pa].cap > 0.0) activate(q);
        const int qa = parent_arc_[q];
        if (qa >= 0) {
          const int q_parent = side == kSource ? tail(qa) : arcs_[qa].head;
          if (q_parent == o) {
            parent_arc_[q] = -1;
            orphans.push_back(q);
          }
        }
      }
      label_[o] = kFree;
      parent_arc_[o] = -1;
    }
  };

  std::vector<int> path_arcs, path_nodes;
  auto augment = [&](int bridge) {
    // Collect the full path first: pushing flow may saturate (and orphan)
    // arcs anywhere along it, which would break a walk over live parents.
    path_arcs.clear();
    path_nodes.clear();
    for (int v = tail(bridge); v != source; v = tail(parent_arc_[v])) {
      path_arcs.push_back(parent_arc_[v]);
      path_nodes.push_back(v);
    }
    for (int v = arcs_[bridge].head; v != sink; v = arcs_[parent_arc_[v]].head) {
      path_arcs.push_back(parent_arc_[v]);
      path_nodes.push_back(v);
    }
    double bottleneck = arcs_[bridge].cap;
    for (int a : path_arcs) bottleneck = std::min(bottleneck, arcs_[a].cap);

    auto push = [&](int a) {
      arcs_[a].cap -= bottleneck;
      arcs_[a ^ 1].cap += bottleneck;
    };
    push(bridge);
    for (int a : path_arcs) push(a);
    for (size_t i = 0; i < path_arcs.size(); ++i) {
      if (arcs_[path_arcs[i]].cap <= 0.0) {
        parent_arc_[path_nodes[i]] = -1;
        orphans.push_back(path_nodes[i]);
      }
    }
    total += bottleneck;
    ++origin_time_;  // parents changed; cached origin marks are stale
  };

  while (!active.empty()) {
    const int p = active.front();
    if (label_[p] == kFree) {
      active.pop_front();
      continue;
    }
    int bridge = -1;
    const auto& arcs_of_p = adjacency_[p];
    int& cursor = scan_cursor_[p];
    for (; cursor < static_cast<int>(arcs_of_p.size()); ++cursor) {
      const int a = arcs_of_p[cursor];
      const int q = arcs_[a].head;
      if (label_[p] == kSource) {
        if (arcs_[a].cap <= 0.0) continue;
        if (label_[q] == kFree) {
          label_[q] = kSource;
          parent_arc_[q] = a;
          activate(q);
        } else if (label_[q] == kSink) {
          bridge = a;  // cursor stays: the same arc may bridge again
          break;
        }
      } else {
        if (arcs_[a ^ 1].cap <= 0.0) continue;  // residual arc q->p
        if (label_[q] == kFree) {
          label_[q] = kSink;
          parent_arc_[q] = a ^ 1;  // arc q->p, oriented toward the sink tree
          activate(q);
        } else if (label_[q] == kSource) {
          bridge = a ^ 1;
          break;
        }
      }
    }
    if (bridge < 0) {
      active.pop_front();
      continue;
    }
    augment(bridge);
    adopt_all();
  }

  // Minimal min cut: residual reachability from the source.
  source_side_.assign(n, 0);
  std::deque<int> frontier{source};
  source_side_[source] = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    for (int a : adjacency_[v]) {
      if (arcs_[a].cap <= 0.0 || source_side_[arcs_[a].head]) continue;
      source_side_[arcs_[a].head] = 1;
      frontier.push_back(arcs_[a].head);
    }
  }
  return total;
}

namespace {

struct TvWorkspace {
  const Graph& g;
  std::vector<double> caps;      // effective per-edge bound w * w_e
  std::vector<double> adjusted;  // data with cut-edge contributions absorbed
  std::vector<double> x;
  std::vector<double> duals;
  std::vector<char> cut;
  std::vector<int> local_id;  // scratch: global node -> block-local index
  bool used_fallback = false;
};

struct Block {
  std::vector<int> nodes;
  int depth;
};

// Internal (not yet cut) edges of a block, as (edge_id) list; every uncut
// edge incident to a block node has both endpoints inside the block.
std::vector<int> internal_edges(const TvWorkspace& ws, const std::vector<int>& nodes) {
  std::vector<int> edges;
  for (int v : nodes)
    for (const auto& inc : ws.g.incident(v))
      if (!ws.cut[inc.edge] && v < inc.neighbor) edges.push_back(inc.edge);
  std::sort(edges.begin(), edges.end());
  return edges;
}

double block_mean(const TvWorkspace& ws, const std::vector<int>& nodes) {
  double sum = 0.0;
  for (int v : nodes) sum += ws.adjusted[v];
  return sum / static_cast<double>(nodes.size());
}

// Exact cyclic coordinate minimization on the dual of the block problem;
// writes x and internal-edge duals. Used as the recursion fallback.
void solve_block_reference(TvWorkspace& ws, const std::vector<int>& nodes, double gap_tol,
                           int max_sweeps) {
  const auto edges = internal_edges(ws, nodes);
  for (int v : nodes) ws.x[v] = ws.adjusted[v];
  for (int e : edges) ws.duals[e] = 0.0;
  double scale = 1.0;
  for (int v : nodes) scale = std::max(scale, std::abs(ws.adjusted[v]));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int e : edges) {
      const auto& edge = ws.g.edge(e);
      // coordinate-exact step: Hessian diagonal of the dual is 2
      const double target = ws.duals[e] + 0.5 * (ws.x[edge.j] - ws.x[edge.i]);
      const double clipped = std::clamp(target, -ws.caps[e], ws.caps[e]);
      const double delta = clipped - ws.duals[e];
      if (delta == 0.0) continue;
      ws.duals[e] = clipped;
      ws.x[edge.i] += delta;
      ws.x[edge.j] -= delta;
    }
    double gap = 0.0;
    for (int e : edges) {
      const auto& edge = ws.g.edge(e);
      const double z = ws.x[edge.j] - ws.x[edge.i];
      gap += ws.caps[e] * std::abs(z) - ws.duals[e] * z;
    }
    if (gap <= gap_tol * scale * scale) break;
  }
  ws.used_fallback = true;
}

void extract_block_duals(TvWorkspace& ws, const std::vector<int>& nodes, double constant) {
  const auto edges = internal_edges(ws, nodes);
  for (int e : edges) ws.duals[e] = 0.0;
  if (edges.empty()) return;

  double supply = 0.0;
  for (int v : nodes) supply += std::max(ws.adjusted[v] - constant, 0.0);
  if (supply <= 0.0) return;

  // Feasible divergence flow: D^T duals = adjusted - x on the block.
  const int nb = static_cast<int>(nodes.size());
  for (int t = 0; t < nb; ++t) ws.local_id[nodes[t]] = t;
  FlowNetwork net(nb + 2);
  const int s = nb, t = nb + 1;
  for (int idx = 0; idx < nb; ++idx) {
    const double delta = ws.adjusted[nodes[idx]] - constant;
    if (delta > 0.0)
      net.add_arc(s, idx, delta);
    else if (delta < 0.0)
      net.add_arc(idx, t, -delta);
  }
  std::vector<int> fwd_arc(edges.size());
  for (size_t idx = 0; idx < edges.size(); ++idx) {
    const auto& edge = ws.g.edge(edges[idx]);
    fwd_arc[idx] = net.add_arc(ws.local_id[edge.i], ws.local_id[edge.j], ws.caps[edges[idx]],
                               ws.caps[edges[idx]]);
  }
  const double pushed = net.max_flow(s, t);
  if (pushed < supply - 1e-9 * (1.0 + supply)) {
    // Should not happen for an optimal block; recompute with the reference
    // solver, which produces its own duals.
    solve_block_reference(ws, nodes, 1e-13, 2000000);
    return;
  }
  // net flow i->j of f means dual_e = -f on row (i<j).
  for (size_t idx = 0; idx < edges.size(); ++idx) ws.duals[edges[idx]] = -net.net_flow(fwd_arc[idx]);
}

}  // namespace

TvResult tv_denoise_certified(const Graph& g, std::span<const double> b, double w,
                              const TvOptions& options) {
  if (static_cast<int>(b.size()) != g.num_nodes())
    fail(ErrorCode::DimensionMismatch, "tv_denoise: signal length mismatch");
  if (w < 0.0) fail(ErrorCode::InvalidParameter, "tv_denoise: penalty multiplier must be >= 0");

  TvResult result;
  result.x.assign(b.begin(), b.end());
  result.duals.assign(g.num_edges(), 0.0);
  if (w == 0.0 || g.num_edges() == 0) return result;

  TvWorkspace ws{g,
                 std::vector<double>(g.num_edges()),
                 std::vector<double>(b.begin(), b.end()),
                 std::vector<double>(g.num_nodes(), 0.0),
                 std::vector<double>(g.num_edges(), 0.0),
                 std::vector<char>(g.num_edges(), 0),
                 std::vector<int>(g.num_nodes(), -1),
                 false};
  for (int e = 0; e < g.num_edges(); ++e) ws.caps[e] = w * g.edge(e).w;

  std::vector<Block> stack;
  std::vector<std::vector<int>> terminal_blocks;
  std::vector<int> all(g.num_nodes());
  std::iota(all.begin(), all.end(), 0);
  stack.push_back({std::move(all), 0});

  while (!stack.empty()) {
    Block block = std::move(stack.back());
    stack.pop_back();
    const double level = block_mean(ws, block.nodes);
    if (block.nodes.size() == 1) {
      ws.x[block.nodes[0]] = level;
      terminal_blocks.push_back(std::move(block.nodes));
      continue;
    }
    if (block.depth > options.max_depth) {
      solve_block_reference(ws, block.nodes, options.fallback_gap_tol, options.fallback_max_sweeps);
      continue;
    }

    // Min cut at the block mean: source side = { x* > level }.
    const int nb = static_cast<int>(block.nodes.size());
    for (int t = 0; t < nb; ++t) ws.local_id[block.nodes[t]] = t;
    const auto edges = internal_edges(ws, block.nodes);
    FlowNetwork net(nb + 2);
    const int s = nb, t = nb + 1;
    for (int idx = 0; idx < nb; ++idx) {
      const double excess = ws.adjusted[block.nodes[idx]] - level;
      if (excess > 0.0)
        net.add_arc(s, idx, excess);
      else if (excess < 0.0)
        net.add_arc(idx, t, -excess);
    }
    for (int e : edges)
      net.add_arc(ws.local_id[g.edge(e).i], ws.local_id[g.edge(e).j], ws.caps[e], ws.caps[e]);
    net.max_flow(s, t);

    std::vector<int> high, low;
    for (int idx = 0; idx < nb; ++idx)
      (net.on_source_side(idx) ? high : low).push_back(block.nodes[idx]);

    if (high.empty() || low.empty()) {
      // Constant block. {x > mean} = empty forces x = mean because the
      // stationarity conditions sum to mean(x) = mean(data); {x > mean} =
      // everything is impossible in exact arithmetic for the same reason,
      // so it only appears on the rounding-level tie of a constant block.
      for (int v : block.nodes) ws.x[v] = level;
      terminal_blocks.push_back(std::move(block.nodes));
      continue;
    }

    // Absorb crossing edges as linear boundary terms; duals there are at
    // their bound, with sign fixed by which side is higher.
    for (int e : edges) {
      const auto& edge = g.edge(e);
      const bool i_high = net.on_source_side(ws.local_id[edge.i]);
      const bool j_high = net.on_source_side(ws.local_id[edge.j]);
      if (i_high == j_high) continue;
      ws.cut[e] = 1;
      if (i_high) {
        ws.duals[e] = -ws.caps[e];
        ws.adjusted[edge.i] -= ws.caps[e];
        ws.adjusted[edge.j] += ws.caps[e];
      } else {
        ws.duals[e] = ws.caps[e];
        ws.adjusted[edge.j] -= ws.caps[e];
        ws.adjusted[edge.i] += ws.caps[e];
      }
    }
    stack.push_back({std::move(high), block.depth + 1});
    stack.push_back({std::move(low), block.depth + 1});
  }

  if (options.extract_duals)
    for (const auto& nodes : terminal_blocks) extract_block_duals(ws, nodes, ws.x[nodes[0]]);

  result.x = ws.x;
  result.duals = ws.duals;
  result.used_fallback = ws.used_fallback;
  return result;
}

std::vector<double> tv_denoise(const Graph& g, std::span<const double> b, double w) {
  return tv_denoise_certified(g, b, w).x;
}

TvResult tv_denoise_reference(const Graph& g, std::span<const double> b, double w, double gap_tol,
                              int max_sweeps) {
  if (static_cast<int>(b.size()) != g.num_nodes())
    fail(ErrorCode::DimensionMismatch, "tv_denoise_reference: signal length mismatch");
  if (w < 0.0) fail(ErrorCode::InvalidParameter, "tv_denoise_reference: penalty multiplier must be >= 0");
  TvResult result;
  result.x.assign(b.begin(), b.end());
  result.duals.assign(g.num_edges(), 0.0);
  if (w == 0.0 || g.num_edges() == 0) return result;

  std::vector<double> caps(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) caps[e] = w * g.edge(e).w;
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int e = 0; e < g.num_edges(); ++e) {
      const auto& edge = g.edge(e);
      const double target = result.duals[e] + 0.5 * (result.x[edge.j] - result.x[edge.i]);
      const double clipped = std::clamp(target, -caps[e], caps[e]);
      const double delta = clipped - result.duals[e];
      if (delta == 0.0) continue;
      result.duals[e] = clipped;
      result.x[edge.i] += delta;
      result.x[edge.j] -= delta;
    }
    double gap = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
      const auto& edge = g.edge(e);
      const double z = result.x[edge.j] - result.x[edge.i];
      gap += caps[e] * std::abs(z) - result.duals[e] * z;
    }
    if (gap <= gap_tol * scale * scale) break;
  }
  return result;
}

}  // namespace gtf
