#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wwls {

// Undirected node-labeled graph: symmetric adjacency lists, no self-loops,
// no duplicate edges, nonnegative integer node labels.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);
  Graph(int n, const std::vector<std::pair<int, int>>& edges,
        std::vector<int> labels = {});

  int node_count() const { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const { return edge_count_; }

  std::span<const int> neighbors(int v) const;
  int degree(int v) const;
  int label(int v) const;
  const std::vector<int>& labels() const { return labels_; }
  bool has_edge(int u, int v) const;

  // Every edge once, as (u, v) with u < v, sorted.
  std::vector<std::pair<int, int>> edges() const;

  void add_edge(int u, int v);
  void remove_edge(int u, int v);
  void set_labels(std::vector<int> labels);

 private:
  void check_node(int v) const;

  std::vector<std::vector<int>> adj_;
  std::vector<int> labels_;
  std::size_t edge_count_ = 0;
};

struct LabeledDataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> class_labels;  // one per graph
};

enum class NoiseMode { rewire, add };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::rewire;
  int count = 0;
  std::uint64_t seed = 0;
};

// Copy of g with each node labeled by its degree.
Graph assign_degree_labels(const Graph& g);

// Erdos-Renyi G(n, p); labels all zero. Pure function of its arguments.
Graph gen_random_graph(int n, double p, std::uint64_t seed);

// n-cycle (n >= 3); labels all zero.
Graph gen_cycle(int n);

// rows x cols grid; labels all zero.
Graph gen_grid(int rows, int cols);

// Applies spec.count sequential edge edits driven by spec.seed.
//  rewire: pick a random existing edge (a, b) with a < b, keep a, resample c
//          uniformly from nodes with c != a and (a, c) absent; replaces (a, b).
//  add:    insert a uniformly random absent edge.
// Throws std::runtime_error (with the failing op index) if no legal edit exists.
Graph perturb(const Graph& g, const NoiseSpec& spec);

// Frobenius norm of L(g1) - L(g2) for graphs on the same node set,
// nodes aligned by index. Throws std::invalid_argument on size mismatch.
double laplacian_frobenius(const Graph& g1, const Graph& g2);

// Relabels nodes: node v of g becomes node perm[v] of the result.
Graph permute_nodes(const Graph& g, const std::vector<int>& perm);

}  // namespace wwls
