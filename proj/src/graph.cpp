#include "wwls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rand_util.hpp"

namespace wwls {

Graph::Graph(int n) {
  if (n < 0) throw std::invalid_argument("Graph: negative node count");
  adj_.resize(n);
  labels_.assign(n, 0);
}

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges,
             std::vector<int> labels)
    : Graph(n) {
  for (const auto& [u, v] : edges) add_edge(u, v);
  if (!labels.empty()) set_labels(std::move(labels));
}

void Graph::check_node(int v) const {
  if (v < 0 || v >= node_count())
    throw std::out_of_range("Graph: node index " + std::to_string(v) +
                            " out of range [0, " +
                            std::to_string(node_count()) + ")");
}

std::span<const int> Graph::neighbors(int v) const {
  check_node(v);
  return adj_[v];
}

int Graph::degree(int v) const {
  check_node(v);
  return static_cast<int>(adj_[v].size());
}

int Graph::label(int v) const {
  check_node(v);
  return labels_[v];
}

bool Graph::has_edge(int u, int v) const {
  check_node(u);
  check_node(v);
  if (adj_[u].size() > adj_[v].size()) std::swap(u, v);
  return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count_);
  for (int u = 0; u < node_count(); ++u)
    for (int v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  std::sort(out.begin(), out.end());
  return out;
}

void Graph::add_edge(int u, int v) {
  check_node(u);
  check_node(v);
  if (u == v)
    throw std::invalid_argument("Graph: self-loop at node " +
                                std::to_string(u));
  if (has_edge(u, v))
    throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(u) +
                                ", " + std::to_string(v) + ")");
  adj_[u].push_back(v);
  adj_[v].push_back(u);
  ++edge_count_;
}

void Graph::remove_edge(int u, int v) {
  check_node(u);
  check_node(v);
  auto drop = [](std::vector<int>& list, int x) {
    auto it = std::find(list.begin(), list.end(), x);
    if (it == list.end()) return false;
    list.erase(it);
    return true;
  };
  if (!drop(adj_[u], v))
    throw std::invalid_argument("Graph: removing absent edge (" +
                                std::to_string(u) + ", " + std::to_string(v) +
                                ")");
  drop(adj_[v], u);
  --edge_count_;
}

void Graph::set_labels(std::vector<int> labels) {
  if (static_cast<int>(labels.size()) != node_count())
    throw std::invalid_argument("Graph: label count " +
                                std::to_string(labels.size()) +
                                " does not match node count " +
                                std::to_string(node_count()));
  for (int l : labels)
    if (l < 0)
      throw std::invalid_argument("Graph: negative label " + std::to_string(l));
  labels_ = std::move(labels);
}

Graph assign_degree_labels(const Graph& g) {
  Graph out = g;
  std::vector<int> labels(g.node_count());
  for (int v = 0; v < g.node_count(); ++v) labels[v] = g.degree(v);
  out.set_labels(std::move(labels));
  return out;
}

Graph gen_random_graph(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_random_graph: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("gen_random_graph: p must be in [0, 1]");
  Graph g(n);
  std::mt19937_64 rng(seed);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (detail::uniform_unit(rng) < p) g.add_edge(u, v);
  return g;
}

Graph gen_cycle(int n) {
  if (n < 3) throw std::invalid_argument("gen_cycle: n must be >= 3");
  Graph g(n);
  for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

Graph gen_grid(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("gen_grid: rows and cols must be >= 1");
  Graph g(rows * cols);
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.add_edge(id(r, c), id(r, c + 1));
      if (r + 1 < rows) g.add_edge(id(r, c), id(r + 1, c));
    }
  return g;
}

Graph perturb(const Graph& g, const NoiseSpec& spec) {
  if (spec.count < 0) throw std::invalid_argument("perturb: negative count");
  Graph out = g;
  std::mt19937_64 rng(spec.seed);
  const int n = out.node_count();
  const std::uint64_t max_edges =
      static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;

  for (int op = 0; op < spec.count; ++op) {
    if (spec.mode == NoiseMode::rewire) {
      if (out.edge_count() == 0)
        throw std::runtime_error("perturb: rewire op " + std::to_string(op) +
                                 " has no edge to rewire");
      auto edges = out.edges();
      const auto [a, b] =
          edges[detail::uniform_below(rng, edges.size())];
      // Keep endpoint a; a full neighborhood (plus b gone, c must differ from
      // a and avoid existing edges) can make the op infeasible.
      if (static_cast<int>(out.neighbors(a).size()) >= n - 1) {
        bool any = false;
        for (int c = 0; c < n && !any; ++c)
          any = (c != a && c != b && !out.has_edge(a, c));
        if (!any)
          throw std::runtime_error("perturb: rewire op " + std::to_string(op) +
                                   " has no legal replacement edge");
      }
      out.remove_edge(a, b);
      for (;;) {
        const int c = static_cast<int>(detail::uniform_below(rng, n));
        if (c == a || out.has_edge(a, c)) continue;
        out.add_edge(a, c);
        break;
      }
    } else {
      if (out.edge_count() >= max_edges)
        throw std::runtime_error("perturb: add op " + std::to_string(op) +
                                 " on a complete graph");
      for (;;) {
        const int u = static_cast<int>(detail::uniform_below(rng, n));
        const int v = static_cast<int>(detail::uniform_below(rng, n));
        if (u == v || out.has_edge(u, v)) continue;
        out.add_edge(u, v);
        break;
      }
    }
  }
  return out;
}

double laplacian_frobenius(const Graph& g1, const Graph& g2) {
  if (g1.node_count() != g2.node_count())
    throw std::invalid_argument(
        "laplacian_frobenius: node counts differ (" +
        std::to_string(g1.node_count()) + " vs " +
        std::to_string(g2.node_count()) + ")");
  const int n = g1.node_count();
  double sum = 0.0;
  for (int v = 0; v < n; ++v) {
    const double dd = g1.degree(v) - g2.degree(v);
    sum += dd * dd;
  }
  // Off-diagonal entries differ by +-1 exactly on the symmetric difference of
  // the edge sets; each edge contributes two matrix entries.
  std::size_t sym_diff = 0;
  for (const auto& [u, v] : g1.edges())
    if (!g2.has_edge(u, v)) ++sym_diff;
  for (const auto& [u, v] : g2.edges())
    if (!g1.has_edge(u, v)) ++sym_diff;
  sum += 2.0 * static_cast<double>(sym_diff);
  return std::sqrt(sum);
}

Graph permute_nodes(const Graph& g, const std::vector<int>& perm) {
  const int n = g.node_count();
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute_nodes: permutation size mismatch");
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p])
      throw std::invalid_argument("permute_nodes: not a permutation");
    seen[p] = 1;
  }
  Graph out(n);
  std::vector<int> labels(n);
  for (int v = 0; v < n; ++v) labels[perm[v]] = g.label(v);
  out.set_labels(std::move(labels));
  for (const auto& [u, v] : g.edges()) out.add_edge(perm[u], perm[v]);
  return out;
}

}  // namespace wwls
