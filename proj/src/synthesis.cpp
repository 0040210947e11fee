#include "gtf/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtf/pcg.hpp"
#include "gtf/rng.hpp"

namespace gtf {

std::vector<double> gaussian_mixture_signal(const std::vector<std::vector<double>>& coords,
                                            const std::vector<GaussianCenter>& centers) {
  std::vector<double> x(coords.size(), 0.0);
  for (const auto& c : centers) {
    if (!(c.scale > 0.0)) fail(ErrorCode::InvalidParameter, "gaussian center needs scale > 0");
    for (size_t i = 0; i < coords.size(); ++i) {
      if (coords[i].size() != c.mean.size())
        fail(ErrorCode::DimensionMismatch, "gaussian center dimension mismatch");
      double d2 = 0.0;
      for (size_t t = 0; t < c.mean.size(); ++t) {
        const double d = coords[i][t] - c.mean[t];
        d2 += d * d;
      }
      x[i] += c.amplitude * std::exp(-d2 / (2.0 * c.scale * c.scale));
    }
  }
  return x;
}

PoissonSignal poisson_equation_signal(const Graph& g, PoissonMode mode, int nnz,
                                      std::uint64_t seed) {
  const int n = g.num_nodes();
  if (connected_components(g, {}).count != 1)
    fail(ErrorCode::Disconnected, "poisson_equation_signal needs a connected graph");
  PoissonSignal out;
  out.b.assign(n, 0.0);
  Rng rng(seed);
  if (mode == PoissonMode::Dense) {
    for (int i = 0; i < n; ++i) out.b[i] = rng.normal();
  } else {
    if (nnz < 1 || nnz > n) fail(ErrorCode::InvalidParameter, "sparse mode needs 1 <= nnz <= n");
    // Distinct support drawn without replacement (partial Fisher-Yates).
    std::vector<int> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    for (int t = 0; t < nnz; ++t) {
      const int pick = t + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - t)));
      std::swap(nodes[t], nodes[pick]);
      out.b[nodes[t]] = rng.normal();
    }
  }

  // Center so L x = b is solvable, then solve on the mean-zero subspace.
  std::vector<double> rhs = out.b;
  const double mean_b = std::accumulate(rhs.begin(), rhs.end(), 0.0) / n;
  for (double& v : rhs) v -= mean_b;

  auto project = [n](std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    for (double& vi : v) vi -= m;
  };
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    g.apply_laplacian(x, y);
  };
  std::vector<double> x(n, 0.0);
  pcg(apply, g.laplacian_diagonal(), rhs, x, 1e-9, std::max(2000, 80 * n));
  project(x);
  out.x = std::move(x);
  return out;
}

std::vector<double> random_walk_signal(const Graph& g, int starters, int max_walks,
                                       std::uint64_t seed, double forced_decay) {
  const int n = g.num_nodes();
  if (n < 1) fail(ErrorCode::InvalidParameter, "random_walk_signal needs a nonempty graph");
  if (starters < 1 || starters > n)
    fail(ErrorCode::InvalidParameter, "random_walk_signal needs 1 <= starters <= n");
  if (max_walks < 0) fail(ErrorCode::InvalidParameter, "max_walks must be >= 0");
  Rng rng(seed);
  std::vector<int> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0);
  std::vector<double> x(n, 0.0);
  for (int s = 0; s < starters; ++s) {
    const int pick = s + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - s)));
    std::swap(nodes[s], nodes[pick]);
    const int start = nodes[s];
    double decay = forced_decay;
    if (decay < 0.0) {
      do {
        decay = rng.uniform();
      } while (decay <= 0.0);  // open interval (0,1): a zero decay never terminates
    }
    const int walks = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_walks) + 1));
    for (int w = 0; w < walks; ++w) {
      int at = start;
      x[at] += 1.0;
      while (true) {
        if (rng.uniform() < decay) break;  // decay drawn before each step
        const auto inc = g.incident(at);
        if (inc.empty()) break;
        at = inc[rng.uniform_int(inc.size())].neighbor;
        x[at] += 1.0;
      }
    }
  }
  return x;
}

std::vector<double> add_noise(std::span<const double> x, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) fail(ErrorCode::InvalidParameter, "sigma must be >= 0");
  std::vector<double> y(x.begin(), x.end());
  if (sigma == 0.0) return y;
  Rng rng(seed);
  for (double& v : y) v += sigma * rng.normal();
  return y;
}

}  // namespace gtf
