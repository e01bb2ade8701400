#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wwls/bocs.hpp"
#include "wwls/graph.hpp"
#include "wwls/ot.hpp"
#include "wwls/wl_hash.hpp"

namespace wwls {

enum class SolverKind { exact, sinkhorn };

struct SolverSpec {
  SolverKind kind = SolverKind::exact;
  double epsilon = 1e-2;   // sinkhorn regularization
  int max_iter = 10000;
  double tol = 1e-9;
};

// Per-node bag-of-complete-subtrees features at h = params.iterations.
std::vector<BocsVector> graph_bocs(const Graph& g, const HashParams& params);

// Integer ground-distance matrix: d[i][j] = l1_ted(a[i], b[j]).
struct GroundMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::int64_t> values;  // row-major
  std::int64_t at(std::size_t i, std::size_t j) const {
    return values[i * cols + j];
  }
};

GroundMatrix ground_matrix(const std::vector<BocsVector>& a,
                           const std::vector<BocsVector>& b);

// 1-Wasserstein distance between the uniform node distributions of g1 and g2
// with the L1 subtree ground distance. The exact path runs the integer
// transportation solver on supplies scaled by |V1|*|V2| and is exactly
// symmetric; sinkhorn approximates it. wwls_transport exposes the full plan
// (cost field = the distance, converged flag from the solver).
TransportPlan wwls_transport(const Graph& g1, const Graph& g2,
                             const HashParams& params,
                             const SolverSpec& solver = {});

double wwls_distance(const Graph& g1, const Graph& g2, const HashParams& params,
                     const SolverSpec& solver = {});

// Categorical baseline: joint WL refinement of the pair, ground distance =
// Hamming mismatches across the h+1 label coordinates divided by (h+1),
// exact transport.
double wwl_baseline_distance(const Graph& g1, const Graph& g2, int h);

// exp(-gamma * wwls_distance). gamma > 0 required.
double kernel_value(const Graph& g1, const Graph& g2, const HashParams& params,
                    double gamma, const SolverSpec& solver = {});

enum class MatrixMode { distance, kernel };

struct PairwiseMatrix {
  std::size_t n = 0;
  MatrixMode mode = MatrixMode::distance;
  std::vector<double> values;  // row-major, symmetric
  int nonconverged = 0;        // sinkhorn pairs that hit max_iter
  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// All graph pairs of ds, computed over `jobs` threads (0 = hardware
// concurrency). Values are independent of the thread count.
PairwiseMatrix pairwise_matrix(const LabeledDataset& ds,
                               const HashParams& params, MatrixMode mode,
                               double gamma, const SolverSpec& solver,
                               int jobs = 0);

struct KnnReport {
  double accuracy = 0.0;
  // (true class, predicted class) -> count, over all leave-one-out queries.
  std::vector<std::pair<std::pair<int, int>, int>> confusion;
};

// Leave-one-out k-nearest-neighbor classification on a distance matrix.
// Majority vote; ties broken by smaller mean distance, then lower class id.
KnnReport knn_eval(const PairwiseMatrix& dist, const std::vector<int>& labels,
                   int k_neighbors);

}  // namespace wwls
