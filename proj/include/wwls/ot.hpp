#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wwls {

// Nonnegative weights summing to 1 (tolerance 1e-12). Throws
// std::invalid_argument otherwise.
class Histogram {
 public:
  explicit Histogram(std::vector<double> weights);
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

// Dense nonnegative finite cost matrix, row-major.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> values_;
};

struct TransportPlan {
  std::size_t rows = 0, cols = 0;
  std::vector<double> plan;  // row-major coupling matrix
  double cost = 0.0;         // <C, P>, entropy never included
  bool converged = true;     // false only when sinkhorn hits max_iter
  int iterations = 0;

  double at(std::size_t i, std::size_t j) const {
    return plan[i * cols + j];
  }
  std::vector<double> row_marginals() const;
  std::vector<double> col_marginals() const;
};

// Exact discrete optimal transport via successive-shortest-path min-cost
// flow (dense Dijkstra with potentials). Plan marginals match a and b to
// numerical precision; cost is the exact optimum.
TransportPlan emd(const Histogram& a, const Histogram& b,
                  const CostMatrix& cost);

// Entropic regularization, log-domain updates. Stops when the L1 marginal
// violation drops below tol or after max_iter sweeps (then converged=false,
// plan still returned). Ends on a row update so row marginals are exact.
TransportPlan sinkhorn(const Histogram& a, const Histogram& b,
                       const CostMatrix& cost, double epsilon,
                       int max_iter = 10000, double tol = 1e-9);

namespace detail {

// Integer transportation problem: supplies[i] units from source i,
// demands[j] units into sink j, arc cost per unit cost[i * cols + j].
// Returns the optimal flow matrix; total_cost is exact in int64.
struct IntTransportResult {
  std::vector<std::int64_t> flow;  // row-major
  std::int64_t total_cost = 0;
};

IntTransportResult solve_int_transport(const std::vector<std::int64_t>& supplies,
                                       const std::vector<std::int64_t>& demands,
                                       const std::vector<std::int64_t>& cost);

}  // namespace detail

}  // namespace wwls
