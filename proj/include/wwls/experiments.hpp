#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wwls/graph.hpp"
#include "wwls/wwls.hpp"

namespace wwls {

enum class GraphKind { random, cycle, grid };

struct NoiseExperimentConfig {
  GraphKind kind = GraphKind::random;
  NoiseMode mode = NoiseMode::rewire;
  int nodes = 50;
  double edge_prob = 0.1;
  int rows = 0, cols = 0;      // grid shape; 0 = near-square factoring of nodes
  int max_noise = 30;
  int trials = 20;
  int h = 2;
  int k = 2;
  std::uint64_t modulus = 0;   // 0 = default modulus
  std::uint64_t seed = 1;
  SolverSpec solver{};
  int jobs = 0;
};

// Per trial: a base graph and its increasingly perturbed versions, where noise
// level v applies the first v edits of one edit stream. Each metric series is
// the raw distance base-vs-perturbed, indexed [trial][noise].
struct NoiseExperimentResult {
  std::vector<std::vector<double>> wwls;
  std::vector<std::vector<double>> wwl_baseline;
  std::vector<std::vector<double>> laplacian;
};

NoiseExperimentResult run_noise_experiment(const NoiseExperimentConfig& cfg);

// rows = cols = closest integer factoring of n (largest divisor <= sqrt(n)).
std::pair<int, int> near_square_factoring(int n);

// Spearman rank correlation; average ranks over ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Mean over trials at each noise level: in[trial][noise] -> out[noise].
std::vector<double> trial_mean(const std::vector<std::vector<double>>& series);
std::vector<double> trial_std(const std::vector<std::vector<double>>& series);

}  // namespace wwls
