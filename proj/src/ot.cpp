#include "wwls/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wwls {

Histogram::Histogram(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty())
    throw std::invalid_argument("Histogram: at least one bin required");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("Histogram: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("Histogram: weights must sum to 1, got " +
                                std::to_string(sum));
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0)
    throw std::invalid_argument("CostMatrix: empty dimensions");
  if (values_.size() != rows_ * cols_)
    throw std::invalid_argument("CostMatrix: value count mismatch");
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument(
          "CostMatrix: entries must be finite and nonnegative");
}

std::vector<double> TransportPlan::row_marginals() const {
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i] += at(i, j);
  return out;
}

std::vector<double> TransportPlan::col_marginals() const {
  std::vector<double> out(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[j] += at(i, j);
  return out;
}

namespace {

// Successive shortest paths on the bipartite transportation network:
// sources 0..m-1, sinks m..m+n-1, forward arcs (i, j) with unlimited
// capacity, backward residual arcs wherever flow is positive. Dense Dijkstra
// with Johnson potentials keeps reduced costs nonnegative.
template <typename FlowT, typename CostT>
struct TransportSolver {
  std::size_t m, n;
  const std::vector<CostT>& cost;  // row-major m x n
  std::vector<FlowT> supply, demand, flow;
  std::vector<CostT> potential;
  int augmentations = 0;

  TransportSolver(std::vector<FlowT> s, std::vector<FlowT> d,
                  const std::vector<CostT>& c)
      : m(s.size()),
        n(d.size()),
        cost(c),
        supply(std::move(s)),
        demand(std::move(d)),
        flow(m * n, FlowT(0)),
        potential(m + n, CostT(0)) {}

  CostT arc_cost(std::size_t i, std::size_t j) const { return cost[i * n + j]; }

  void solve(FlowT source_eps) {
    const CostT inf = std::numeric_limits<CostT>::max() / 4;
    const std::size_t num_nodes = m + n;
    const int aug_cap = static_cast<int>(4 * m * n + 4 * num_nodes + 16);
    std::vector<CostT> dist(num_nodes);
    std::vector<int> pred(num_nodes);
    std::vector<bool> done(num_nodes);

    for (;;) {
      // Next source: largest remaining supply.
      std::size_t k = num_nodes;
      FlowT best_supply = source_eps;
      for (std::size_t i = 0; i < m; ++i)
        if (supply[i] > best_supply) {
          best_supply = supply[i];
          k = i;
        }
      if (k == num_nodes) break;

      std::fill(dist.begin(), dist.end(), inf);
      std::fill(pred.begin(), pred.end(), -1);
      std::fill(done.begin(), done.end(), false);
      dist[k] = CostT(0);
      for (;;) {
        std::size_t u = num_nodes;
        CostT du = inf;
        for (std::size_t v = 0; v < num_nodes; ++v)
          if (!done[v] && dist[v] < du) {
            du = dist[v];
            u = v;
          }
        if (u == num_nodes) break;
        done[u] = true;
        if (u < m) {
          for (std::size_t j = 0; j < n; ++j) {
            // Settled nodes stay settled: rounding can make a reduced cost
            // minutely negative, and re-relaxing would let pred form a cycle.
            if (done[m + j]) continue;
            const CostT rc = arc_cost(u, j) - potential[u] + potential[m + j];
            if (du + rc < dist[m + j]) {
              dist[m + j] = du + rc;
              pred[m + j] = static_cast<int>(u);
            }
          }
        } else {
          const std::size_t j = u - m;
          for (std::size_t i = 0; i < m; ++i) {
            if (done[i] || !(flow[i * n + j] > FlowT(0))) continue;
            const CostT rc = -arc_cost(i, j) - potential[u] + potential[i];
            if (du + rc < dist[i]) {
              dist[i] = du + rc;
              pred[i] = static_cast<int>(u);
            }
          }
        }
      }

      std::size_t sink = num_nodes;
      for (std::size_t j = 0; j < n; ++j)
        if (demand[j] > FlowT(0) && dist[m + j] < inf &&
            (sink == num_nodes || dist[m + j] < dist[sink]))
          sink = m + j;
      if (sink == num_nodes)
        throw std::runtime_error(
            "transport: no augmenting path with remaining demand");

      // Forward arcs are uncapacitated; only backward arcs bound the push.
      FlowT delta = std::min(supply[k], demand[sink - m]);
      for (std::size_t v = sink; v != k;) {
        if (pred[v] < 0)
          throw std::runtime_error("transport: broken predecessor chain");
        const std::size_t u = static_cast<std::size_t>(pred[v]);
        if (u >= m) delta = std::min(delta, flow[v * n + (u - m)]);
        v = u;
      }
      if (!(delta > FlowT(0)))
        throw std::runtime_error("transport: degenerate zero augmentation");

      for (std::size_t v = sink; v != k;) {
        const std::size_t u = static_cast<std::size_t>(pred[v]);
        if (u < m)
          flow[u * n + (v - m)] += delta;
        else
          flow[v * n + (u - m)] -= delta;
        v = u;
      }
      supply[k] -= delta;
      demand[sink - m] -= delta;

      // Reduced costs here read c - pi[tail] + pi[head], so distances are
      // subtracted to keep every residual arc nonnegative for the next round.
      for (std::size_t v = 0; v < num_nodes; ++v)
        if (dist[v] < inf) potential[v] -= dist[v];

      if (++augmentations > aug_cap)
        throw std::runtime_error("transport: augmentation limit exceeded");
    }
  }

  CostT total_cost() const {
    CostT total(0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        total += flow[i * n + j] * arc_cost(i, j);
    return total;
  }
};

}  // namespace

TransportPlan emd(const Histogram& a, const Histogram& b,
                  const CostMatrix& cost) {
  if (a.size() != cost.rows() || b.size() != cost.cols())
    throw std::invalid_argument(
        "emd: histogram sizes do not match cost matrix");
  TransportSolver<double, double> solver(a.weights(), b.weights(),
                                         cost.values());
  solver.solve(1e-12);
  TransportPlan plan;
  plan.rows = a.size();
  plan.cols = b.size();
  plan.plan = std::move(solver.flow);
  plan.cost = 0.0;
  for (std::size_t i = 0; i < plan.rows; ++i)
    for (std::size_t j = 0; j < plan.cols; ++j)
      plan.cost += plan.at(i, j) * cost.at(i, j);
  plan.converged = true;
  plan.iterations = solver.augmentations;
  return plan;
}

namespace detail {

IntTransportResult solve_int_transport(const std::vector<std::int64_t>& supplies,
                                       const std::vector<std::int64_t>& demands,
                                       const std::vector<std::int64_t>& cost) {
  if (supplies.empty() || demands.empty())
    throw std::invalid_argument("solve_int_transport: empty marginals");
  if (cost.size() != supplies.size() * demands.size())
    throw std::invalid_argument("solve_int_transport: cost size mismatch");
  std::int64_t total_supply = 0, total_demand = 0;
  for (std::int64_t s : supplies) {
    if (s < 0) throw std::invalid_argument("solve_int_transport: negative supply");
    total_supply += s;
  }
  for (std::int64_t d : demands) {
    if (d < 0) throw std::invalid_argument("solve_int_transport: negative demand");
    total_demand += d;
  }
  if (total_supply != total_demand)
    throw std::invalid_argument("solve_int_transport: unbalanced problem");
  for (std::int64_t c : cost)
    if (c < 0) throw std::invalid_argument("solve_int_transport: negative cost");

  TransportSolver<std::int64_t, std::int64_t> solver(supplies, demands, cost);
  solver.solve(0);
  IntTransportResult result;
  result.total_cost = solver.total_cost();
  result.flow = std::move(solver.flow);
  return result;
}

}  // namespace detail

namespace {

// log(sum exp(v)) with the max trick; empty / all -inf input gives -inf.
double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

TransportPlan sinkhorn(const Histogram& a, const Histogram& b,
                       const CostMatrix& cost, double epsilon, int max_iter,
                       double tol) {
  if (a.size() != cost.rows() || b.size() != cost.cols())
    throw std::invalid_argument(
        "sinkhorn: histogram sizes do not match cost matrix");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (max_iter < 1)
    throw std::invalid_argument("sinkhorn: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("sinkhorn: tol must be positive");

  const std::size_t m = a.size(), n = b.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_a(m), log_b(n);
  for (std::size_t i = 0; i < m; ++i)
    log_a[i] = a[i] > 0.0 ? std::log(a[i]) : neg_inf;
  for (std::size_t j = 0; j < n; ++j)
    log_b[j] = b[j] > 0.0 ? std::log(b[j]) : neg_inf;

  std::vector<double> f(m, 0.0), g(n, 0.0);
  std::vector<double> scratch(std::max(m, n));
  std::vector<double> plan(m * n, 0.0);

  auto fill_plan = [&] {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double e = f[i] + g[j];
        plan[i * n + j] =
            std::isfinite(e) ? std::exp((e - cost.at(i, j)) / epsilon) : 0.0;
      }
  };

  bool converged = false;
  int sweeps = 0;
  while (sweeps < max_iter) {
    ++sweeps;
    for (std::size_t j = 0; j < n; ++j) {
      scratch.resize(m);
      for (std::size_t i = 0; i < m; ++i)
        scratch[i] = (f[i] - cost.at(i, j)) / epsilon;
      g[j] = log_b[j] == neg_inf
                 ? neg_inf
                 : epsilon * (log_b[j] - log_sum_exp(scratch));
    }
    for (std::size_t i = 0; i < m; ++i) {
      scratch.resize(n);
      for (std::size_t j = 0; j < n; ++j)
        scratch[j] = (g[j] - cost.at(i, j)) / epsilon;
      f[i] = log_a[i] == neg_inf
                 ? neg_inf
                 : epsilon * (log_a[i] - log_sum_exp(scratch));
    }
    // Rows are exact after the f update; convergence is the column drift.
    fill_plan();
    double violation = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col += plan[i * n + j];
      violation += std::abs(col - b[j]);
    }
    if (violation < tol) {
      converged = true;
      break;
    }
  }
  fill_plan();

  TransportPlan out;
  out.rows = m;
  out.cols = n;
  out.plan = std::move(plan);
  out.cost = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.cost += out.at(i, j) * cost.at(i, j);
  out.converged = converged;
  out.iterations = sweeps;
  return out;
}

}  // namespace wwls
