#include "wwls/wwls.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace wwls {

std::vector<BocsVector> graph_bocs(const Graph& g, const HashParams& params) {
  if (g.node_count() == 0)
    throw std::invalid_argument("graph_bocs: empty graph");
  std::vector<BocsVector> out;
  out.reserve(g.node_count());
  for (int v = 0; v < g.node_count(); ++v)
    out.emplace_back(node_subtree_hashes(g, v, params), params);
  return out;
}

GroundMatrix ground_matrix(const std::vector<BocsVector>& a,
                           const std::vector<BocsVector>& b) {
  GroundMatrix gm;
  gm.rows = a.size();
  gm.cols = b.size();
  gm.values.resize(gm.rows * gm.cols);
  for (std::size_t i = 0; i < gm.rows; ++i)
    for (std::size_t j = 0; j < gm.cols; ++j)
      gm.values[i * gm.cols + j] = l1_ted(a[i], b[j]);
  return gm;
}

TransportPlan wwls_transport(const Graph& g1, const Graph& g2,
                             const HashParams& params,
                             const SolverSpec& solver) {
  const auto bocs1 = graph_bocs(g1, params);
  const auto bocs2 = graph_bocs(g2, params);
  const auto gm = ground_matrix(bocs1, bocs2);
  const std::size_t m = gm.rows, n = gm.cols;
  const double scale = static_cast<double>(m) * static_cast<double>(n);

  if (solver.kind == SolverKind::exact) {
    // Uniform marginals 1/m and 1/n scaled by m*n stay integral: every source
    // holds n units, every sink m units, and the optimum cost divides back out.
    const std::vector<std::int64_t> supplies(m, static_cast<std::int64_t>(n));
    const std::vector<std::int64_t> demands(n, static_cast<std::int64_t>(m));
    const auto result = detail::solve_int_transport(supplies, demands, gm.values);
    TransportPlan plan;
    plan.rows = m;
    plan.cols = n;
    plan.plan.resize(m * n);
    for (std::size_t e = 0; e < plan.plan.size(); ++e)
      plan.plan[e] = static_cast<double>(result.flow[e]) / scale;
    plan.cost = static_cast<double>(result.total_cost) / scale;
    plan.converged = true;
    plan.iterations = 0;
    return plan;
  }

  const Histogram a(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  const Histogram b(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  std::vector<double> costs(gm.values.begin(), gm.values.end());
  const CostMatrix cost(m, n, std::move(costs));
  return sinkhorn(a, b, cost, solver.epsilon, solver.max_iter, solver.tol);
}

double wwls_distance(const Graph& g1, const Graph& g2, const HashParams& params,
                     const SolverSpec& solver) {
  return wwls_transport(g1, g2, params, solver).cost;
}

double wwl_baseline_distance(const Graph& g1, const Graph& g2, int h) {
  if (g1.node_count() == 0 || g2.node_count() == 0)
    throw std::invalid_argument("wwl_baseline_distance: empty graph");
  if (h < 0) throw std::invalid_argument("wwl_baseline_distance: negative h");
  const Graph pair[2] = {g1, g2};
  const auto feats = wl_relabel_joint(std::span<const Graph>(pair, 2), h);
  const std::size_t m = feats[0].size(), n = feats[1].size();

  // Ground distance = Hamming mismatch count; dividing by h+1 at the end
  // keeps the transport integral.
  std::vector<std::int64_t> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::int64_t mismatches = 0;
      for (int t = 0; t <= h; ++t)
        mismatches += feats[0][i][t] != feats[1][j][t];
      cost[i * n + j] = mismatches;
    }
  const std::vector<std::int64_t> supplies(m, static_cast<std::int64_t>(n));
  const std::vector<std::int64_t> demands(n, static_cast<std::int64_t>(m));
  const auto result = detail::solve_int_transport(supplies, demands, cost);
  return static_cast<double>(result.total_cost) /
         (static_cast<double>(m) * static_cast<double>(n) *
          static_cast<double>(h + 1));
}

double kernel_value(const Graph& g1, const Graph& g2, const HashParams& params,
                    double gamma, const SolverSpec& solver) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("kernel_value: gamma must be positive");
  return std::exp(-gamma * wwls_distance(g1, g2, params, solver));
}

PairwiseMatrix pairwise_matrix(const LabeledDataset& ds,
                               const HashParams& params, MatrixMode mode,
                               double gamma, const SolverSpec& solver,
                               int jobs) {
  const std::size_t n = ds.graphs.size();
  if (n == 0) throw std::invalid_argument("pairwise_matrix: empty dataset");
  if (mode == MatrixMode::kernel && !(gamma > 0.0))
    throw std::invalid_argument("pairwise_matrix: gamma must be positive");

  PairwiseMatrix out;
  out.n = n;
  out.mode = mode;
  out.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i * n + i] = mode == MatrixMode::kernel ? 1.0 : 0.0;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : hw;
  workers = std::max<std::size_t>(1, std::min(workers, pairs.size()));

  // Per-node features are pair-independent; compute once up front.
  std::vector<std::vector<BocsVector>> bocs(n);
  {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
      for (;;) {
        const std::size_t g = next.fetch_add(1);
        if (g >= n) return;
        try {
          bocs[g] = graph_bocs(ds.graphs[g], params);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t + 1 < workers; ++t) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> nonconverged{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t p = next.fetch_add(1);
      if (p >= pairs.size()) return;
      const auto [i, j] = pairs[p];
      try {
        const auto gm = ground_matrix(bocs[i], bocs[j]);
        double value;
        if (solver.kind == SolverKind::exact) {
          const std::vector<std::int64_t> supplies(
              gm.rows, static_cast<std::int64_t>(gm.cols));
          const std::vector<std::int64_t> demands(
              gm.cols, static_cast<std::int64_t>(gm.rows));
          const auto result =
              detail::solve_int_transport(supplies, demands, gm.values);
          value = static_cast<double>(result.total_cost) /
                  (static_cast<double>(gm.rows) * static_cast<double>(gm.cols));
        } else {
          const Histogram a(
              std::vector<double>(gm.rows, 1.0 / static_cast<double>(gm.rows)));
          const Histogram b(
              std::vector<double>(gm.cols, 1.0 / static_cast<double>(gm.cols)));
          const CostMatrix cost(
              gm.rows, gm.cols,
              std::vector<double>(gm.values.begin(), gm.values.end()));
          const auto plan = sinkhorn(a, b, cost, solver.epsilon,
                                     solver.max_iter, solver.tol);
          if (!plan.converged) nonconverged.fetch_add(1);
          value = plan.cost;
        }
        if (mode == MatrixMode::kernel) value = std::exp(-gamma * value);
        out.values[i * out.n + j] = value;
        out.values[j * out.n + i] = value;
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t + 1 < workers; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  out.nonconverged = nonconverged.load();
  return out;
}

KnnReport knn_eval(const PairwiseMatrix& dist, const std::vector<int>& labels,
                   int k_neighbors) {
  const std::size_t n = dist.n;
  if (labels.size() != n)
    throw std::invalid_argument("knn_eval: label count mismatch");
  if (dist.mode != MatrixMode::distance)
    throw std::invalid_argument("knn_eval: needs a distance matrix");
  if (k_neighbors < 1 || static_cast<std::size_t>(k_neighbors) >= n)
    throw std::invalid_argument(
        "knn_eval: k_neighbors must lie in [1, n_graphs - 1]");

  std::map<std::pair<int, int>, int> confusion;
  std::size_t correct = 0;
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t q = 0; q < n; ++q) {
    order.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (i != q) order.emplace_back(dist.at(q, i), i);
    std::sort(order.begin(), order.end());

    // class -> (votes, summed distance) over the k nearest
    std::map<int, std::pair<int, double>> votes;
    for (int t = 0; t < k_neighbors; ++t) {
      auto& slot = votes[labels[order[t].second]];
      slot.first += 1;
      slot.second += order[t].first;
    }
    int best_class = 0;
    int best_votes = -1;
    double best_mean = 0.0;
    for (const auto& [cls, stat] : votes) {
      const double mean = stat.second / stat.first;
      const bool wins =
          stat.first > best_votes ||
          (stat.first == best_votes && mean < best_mean) ||
          (stat.first == best_votes && mean == best_mean && cls < best_class);
      if (wins) {
        best_class = cls;
        best_votes = stat.first;
        best_mean = mean;
      }
    }
    correct += best_class == labels[q];
    ++confusion[{labels[q], best_class}];
  }

  KnnReport report;
  report.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  report.confusion.assign(confusion.begin(), confusion.end());
  return report;
}

}  // namespace wwls
