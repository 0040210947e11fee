#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtf/graph.hpp"

namespace gtf {

struct GaussianCenter {
  std::vector<double> mean;  // same dimension as the node coordinates
  double scale = 1.0;        // covariance scale (std dev)
  double amplitude = 1.0;
};

/// x_i = sum_c amplitude_c * exp(-||coord_i - mean_c||^2 / (2 scale_c^2))
std::vector<double> gaussian_mixture_signal(const std::vector<std::vector<double>>& coords,
                                            const std::vector<GaussianCenter>& centers);

enum class PoissonMode { Dense, Sparse };

struct PoissonSignal {
  std::vector<double> x;  // L^dagger b, mean zero
  std::vector<double> b;  // right-hand side before centering
};

/// Solves the Poisson equation L x = b with b i.i.d. normal (dense) or
/// supported on nnz random nodes (sparse); b is centered so a solution
/// exists, and x is the mean-zero solution (PCG to 1e-9 relative).
PoissonSignal poisson_equation_signal(const Graph& g, PoissonMode mode, int nnz,
                                      std::uint64_t seed);

/// Total visit counts of decaying random walks: `starters` distinct start
/// nodes chosen uniformly, per-starter termination probability U(0,1) and
/// walk count uniform in {0..max_walks}; termination is drawn before each
/// step. forced_decay >= 0 overrides the per-starter draw (test hook).
std::vector<double> random_walk_signal(const Graph& g, int starters, int max_walks,
                                       std::uint64_t seed, double forced_decay = -1.0);

std::vector<double> add_noise(std::span<const double> x, double sigma, std::uint64_t seed);

}  // namespace gtf
