#include "wwls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rand_util.hpp"

namespace wwls {

std::pair<int, int> near_square_factoring(int n) {
  if (n < 1) throw std::invalid_argument("near_square_factoring: n must be >= 1");
  int rows = 1;
  for (int d = 1; d * d <= n; ++d)
    if (n % d == 0) rows = d;
  return {rows, n / rows};
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument(
        "spearman: series must have equal length >= 2");
  const std::size_t n = x.size();

  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };

  const auto rx = ranks(x);
  const auto ry = ranks(y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("spearman: constant series has no rank order");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> trial_mean(const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  std::vector<double> out(series[0].size(), 0.0);
  for (const auto& trial : series)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += trial[i];
  for (double& v : out) v /= static_cast<double>(series.size());
  return out;
}

std::vector<double> trial_std(const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  const auto mean = trial_mean(series);
  std::vector<double> out(mean.size(), 0.0);
  for (const auto& trial : series)
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = trial[i] - mean[i];
      out[i] += d * d;
    }
  for (double& v : out)
    v = std::sqrt(v / static_cast<double>(series.size()));
  return out;
}

NoiseExperimentResult run_noise_experiment(const NoiseExperimentConfig& cfg) {
  if (cfg.trials < 1)
    throw std::invalid_argument("run_noise_experiment: trials must be >= 1");
  if (cfg.max_noise < 0)
    throw std::invalid_argument("run_noise_experiment: negative max_noise");

  const std::uint64_t modulus = cfg.modulus ? cfg.modulus : kDefaultModulus;
  const HashParams params(modulus, cfg.k, cfg.h, cfg.seed);

  NoiseExperimentResult result;
  const int levels = cfg.max_noise + 1;
  result.wwls.assign(cfg.trials, std::vector<double>(levels, 0.0));
  result.wwl_baseline.assign(cfg.trials, std::vector<double>(levels, 0.0));
  result.laplacian.assign(cfg.trials, std::vector<double>(levels, 0.0));

  auto base_graph = [&](int trial) {
    const std::uint64_t gen_seed = detail::mix_seed(cfg.seed, 2 * trial);
    switch (cfg.kind) {
      case GraphKind::random:
        return gen_random_graph(cfg.nodes, cfg.edge_prob, gen_seed);
      case GraphKind::cycle:
        return gen_cycle(cfg.nodes);
      case GraphKind::grid: {
        int rows = cfg.rows, cols = cfg.cols;
        if (rows < 1 || cols < 1)
          std::tie(rows, cols) = near_square_factoring(cfg.nodes);
        return gen_grid(rows, cols);
      }
    }
    throw std::invalid_argument("run_noise_experiment: unknown graph kind");
  };

  // (trial, level) units so multiple trials spread over the workers.
  struct Task {
    int trial;
    int level;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(cfg.trials) * levels);
  for (int trial = 0; trial < cfg.trials; ++trial)
    for (int level = 0; level < levels; ++level) tasks.push_back({trial, level});

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers =
      cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs) : hw;
  workers = std::max<std::size_t>(1, std::min(workers, tasks.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto [trial, level] = tasks[t];
      try {
        const Graph base = base_graph(trial);
        // Level v replays the first v edits of the trial's edit stream, so
        // the series is nested: level v+1 extends level v's perturbation.
        const NoiseSpec noise{cfg.mode, level,
                              detail::mix_seed(cfg.seed, 2 * trial + 1)};
        const Graph noisy = perturb(base, noise);
        // The generators emit unlabeled graphs; derive categorical labels
        // from node degrees on each side so iteration zero is informative.
        const Graph lhs = assign_degree_labels(base);
        const Graph rhs = assign_degree_labels(noisy);
        result.wwls[trial][level] =
            wwls_distance(lhs, rhs, params, cfg.solver);
        result.wwl_baseline[trial][level] =
            wwl_baseline_distance(lhs, rhs, cfg.h);
        result.laplacian[trial][level] = laplacian_frobenius(lhs, rhs);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w + 1 < workers; ++w) threads.emplace_back(work);
  work();
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);

  return result;
}

}  // namespace wwls
