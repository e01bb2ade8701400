// Release gate: one check per shipped guarantee, one PASS/FAIL line each.
// Exit status is the number of failed checks.
//
// Benchmark-driven checks read the four-file text datasets from
// $WWLS_DATA_DIR (default ./data), accepting either DIR/NAME/NAME_A.txt or
// DIR/NAME_A.txt. When a dataset is absent the check fails with a note
// saying what to download; it never silently skips.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ot_oracle.hpp"
#include "test_util.hpp"
#include "wwls/experiments.hpp"
#include "wwls/graph.hpp"
#include "wwls/matrix_io.hpp"
#include "wwls/ot.hpp"
#include "wwls/tiny_tree.hpp"
#include "wwls/tud_io.hpp"
#include "wwls/wl_hash.hpp"
#include "wwls/wwls.hpp"

#ifndef WWLS_CLI_PATH
#error "WWLS_CLI_PATH must point at the command-line binary"
#endif

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::filesystem::path data_root() {
  if (const char* env = std::getenv("WWLS_DATA_DIR")) return env;
  return "data";
}

std::optional<std::filesystem::path> find_dataset(const std::string& name) {
  const auto base = data_root();
  for (const auto& cand : {base / name, base})
    if (std::filesystem::exists(cand / (name + "_A.txt"))) return cand;
  return std::nullopt;
}

std::string missing_dataset_note(const std::string& name) {
  const auto base = std::filesystem::absolute(data_root());
  return name + " not found (looked for " + name + "_A.txt under " +
         (base / name).string() + " and " + base.string() +
         "; download the benchmark archive and unpack it there, or set "
         "WWLS_DATA_DIR)";
}

std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// --- 1. Known type counts on ENZYMES, and the k=2 hash matching them. ---

Outcome criterion1() {
  const auto root = find_dataset("ENZYMES");
  if (!root) return {false, missing_dataset_note("ENZYMES")};
  const auto start = std::chrono::steady_clock::now();
  const auto ds = wwls::parse_tud_dataset(*root, "ENZYMES");
  const auto rows = wwls::hash_stats(ds, 7, wwls::kDefaultModulus, 1);
  const std::size_t expected[7] = {232,   10646, 25852, 41879,
                                   58327, 75047, 91940};
  std::ostringstream oss;
  bool ok = true;
  for (int h = 1; h <= 7; ++h) {
    const auto& r = rows[static_cast<std::size_t>(h - 1)];
    if (r.canonical != expected[h - 1]) {
      ok = false;
      oss << " h=" << h << " canonical " << r.canonical << " != "
          << expected[h - 1] << ";";
    }
    if (r.hash_k2 != r.canonical) {
      ok = false;
      oss << " h=" << h << " k=2 hash " << r.hash_k2 << " != canonical "
          << r.canonical << ";";
    }
  }
  if (ok)
    oss << "all seven per-iteration type counts match and the k=2 hash is "
           "collision-free";
  oss << " (" << ds.graphs.size() << " graphs, " << std::fixed
      << seconds_since(start) << "s)";
  return {ok, oss.str()};
}

// --- 2. Zero k=2 collisions on three benchmarks, three seeds, h <= 7. ---

Outcome criterion2() {
  const char* names[3] = {"MUTAG", "PROTEINS", "NCI1"};
  std::ostringstream oss;
  bool ok = true;
  long long total_collisions = 0;
  int audits = 0;
  for (const char* name : names) {
    const auto root = find_dataset(name);
    if (!root) {
      ok = false;
      oss << missing_dataset_note(name) << "; ";
      continue;
    }
    const auto ds = wwls::parse_tud_dataset(*root, name);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      for (int h = 1; h <= 7; ++h) {
        const wwls::HashParams params(wwls::kDefaultModulus, 2, h, seed);
        const auto audit = wwls::audit_subtree_types(ds, h, params);
        ++audits;
        if (audit.collisions != 0 || audit.splits != 0) {
          ok = false;
          total_collisions += audit.collisions;
          oss << name << " seed " << seed << " h " << h << ": "
              << audit.collisions << " collisions, " << audit.splits
              << " splits; ";
        }
      }
    }
  }
  if (ok)
    oss << "zero collisions across " << audits
        << " dataset/seed/depth audits (3 datasets x 3 seeds x h 1..7)";
  else if (total_collisions > 0)
    oss << "total collisions " << total_collisions;
  return {ok, oss.str()};
}

// --- 3. Feature-distance sandwich around exact edit distance. ---

Outcome criterion3() {
  auto rng = seeded_rng(33);
  int checked = 0, attempts = 0;
  while (checked < 100) {
    if (++attempts > 20000) return {false, "could not sample enough trees"};
    const int h = 1 + static_cast<int>(rng() % 2);
    const int n1 = 2 + static_cast<int>(rng() % 6);
    const int n2 = 2 + static_cast<int>(rng() % 6);
    const double p = 0.2 + 0.5 * unit_draw(rng);
    const wwls::Graph g1 = wwls_test::random_labeled_graph(n1, p, 3, rng());
    const wwls::Graph g2 = wwls_test::random_labeled_graph(n2, p, 3, rng());
    const int v1 = static_cast<int>(rng() % static_cast<std::uint64_t>(n1));
    const int v2 = static_cast<int>(rng() % static_cast<std::uint64_t>(n2));
    const wwls::TinyTree t1 = wwls::unfolding_tree(g1, v1, h);
    const wwls::TinyTree t2 = wwls::unfolding_tree(g2, v2, h);
    if (t1.size() > 8 || t2.size() > 8) continue;
    if (!wwls::check_ted_bound(t1, t2, h)) {
      std::ostringstream oss;
      oss << "bound violated at sample " << checked << " (h=" << h
          << ", sizes " << t1.size() << "/" << t2.size() << ")";
      return {false, oss.str()};
    }
    ++checked;
  }
  return {true,
          "lower/(2h+2) <= exact edit distance <= feature distance held on "
          "100 random tree pairs (integer comparison)"};
}

// --- 4. Exact transport vs brute-force LP; entropic within 2%. ---

Outcome criterion4() {
  auto rng = seeded_rng(44);
  double worst_gap = 0.0;
  for (int sample = 0; sample < 200; ++sample) {
    const std::size_t m = sample < 100 ? 3 : 4;
    const std::size_t n = m;
    const auto a = wwls_test::random_simplex(m, rng);
    const auto b = wwls_test::random_simplex(n, rng);
    const auto costs = wwls_test::random_costs(m * n, rng);
    const wwls::Histogram ha(a), hb(b);
    const wwls::CostMatrix cm(m, n, costs);
    const auto plan = wwls::emd(ha, hb, cm);
    const double oracle = wwls_test::lp_oracle(a, b, costs);
    worst_gap = std::max(worst_gap, std::abs(plan.cost - oracle));
    if (std::abs(plan.cost - oracle) > 1e-9) {
      std::ostringstream oss;
      oss << "exact solver off by " << std::abs(plan.cost - oracle)
          << " on sample " << sample << " (" << m << "x" << n << ")";
      return {false, oss.str()};
    }
  }
  double worst_rel = 0.0;
  for (int sample = 0; sample < 5; ++sample) {
    const auto a = wwls_test::random_simplex(10, rng);
    const auto b = wwls_test::random_simplex(10, rng);
    const auto costs = wwls_test::random_costs(100, rng);
    const wwls::Histogram ha(a), hb(b);
    const wwls::CostMatrix cm(10, 10, costs);
    const auto exact = wwls::emd(ha, hb, cm);
    const auto approx = wwls::sinkhorn(ha, hb, cm, 1e-3, 300000, 1e-9);
    if (!approx.converged)
      return {false, "entropic solver failed to converge at eps=1e-3"};
    const double rel = std::abs(approx.cost - exact.cost) / exact.cost;
    worst_rel = std::max(worst_rel, rel);
    if (rel > 0.02) {
      std::ostringstream oss;
      oss << "entropic cost off by " << rel * 100.0 << "% on 10x10 sample "
          << sample;
      return {false, oss.str()};
    }
  }
  std::ostringstream oss;
  oss << "200 LP cross-checks within 1e-9 (worst " << worst_gap
      << "); entropic eps=1e-3 within 2% (worst " << worst_rel * 100.0
      << "%)";
  return {true, oss.str()};
}

// --- 5. Distance axioms over random graph pairs. ---

Outcome criterion5() {
  auto rng = seeded_rng(55);
  const wwls::HashParams params(wwls::kDefaultModulus, 2, 2, 7);
  double worst_asym = 0.0;
  for (int pair = 0; pair < 200; ++pair) {
    const int n1 = 8 + static_cast<int>(rng() % 6);
    const int n2 = 8 + static_cast<int>(rng() % 6);
    const double p = 0.15 + 0.3 * unit_draw(rng);
    const wwls::Graph g1 = wwls_test::random_labeled_graph(n1, p, 3, rng());
    const wwls::Graph g2 = wwls_test::random_labeled_graph(n2, p, 3, rng());
    const double ab = wwls::wwls_distance(g1, g2, params);
    const double ba = wwls::wwls_distance(g2, g1, params);
    worst_asym = std::max(worst_asym, std::abs(ab - ba));
    if (std::abs(ab - ba) > 1e-9) {
      std::ostringstream oss;
      oss << "asymmetry " << std::abs(ab - ba) << " at pair " << pair;
      return {false, oss.str()};
    }
    if (wwls::wwls_distance(g1, g1, params) != 0.0)
      return {false, "nonzero self distance"};
    const wwls::Graph pg =
        wwls::permute_nodes(g1, wwls_test::random_permutation(n1, rng()));
    if (wwls::wwls_distance(g1, pg, params) != 0.0)
      return {false, "nonzero distance to a node-permuted copy"};
  }
  std::ostringstream oss;
  oss << "200 pairs: symmetric (worst gap " << worst_asym
      << "), zero on identical graphs and node-permuted copies";
  return {true, oss.str()};
}

// --- 6. Smooth response to rewiring noise; baseline saturates earlier. ---

int saturation_level(const std::vector<double>& series) {
  const double mx = *std::max_element(series.begin(), series.end());
  if (mx <= 0.0) return 0;
  for (std::size_t v = 0; v < series.size(); ++v)
    if (series[v] >= 0.9 * mx) return static_cast<int>(v);
  return static_cast<int>(series.size()) - 1;
}

Outcome criterion6() {
  wwls::NoiseExperimentConfig cfg;
  cfg.kind = wwls::GraphKind::random;
  cfg.mode = wwls::NoiseMode::rewire;
  cfg.nodes = 50;
  cfg.edge_prob = 0.1;
  cfg.max_noise = 30;
  cfg.trials = 20;
  cfg.h = 2;
  cfg.k = 2;
  cfg.seed = 1;
  const auto start = std::chrono::steady_clock::now();
  const auto res = wwls::run_noise_experiment(cfg);

  std::vector<double> levels(31);
  for (int v = 0; v <= 30; ++v) levels[static_cast<std::size_t>(v)] = v;
  const double rho = wwls::spearman(levels, wwls::trial_mean(res.wwls));

  int earlier = 0;
  for (int t = 0; t < 20; ++t) {
    const auto& wwls_row = res.wwls[static_cast<std::size_t>(t)];
    const auto& base_row = res.wwl_baseline[static_cast<std::size_t>(t)];
    if (saturation_level(base_row) < saturation_level(wwls_row)) ++earlier;
  }

  std::ostringstream oss;
  oss << "rank correlation(noise, mean distance) = " << rho
      << " (need >= 0.95); refinement baseline saturates earlier in "
      << earlier << "/20 trials (need >= 15); " << std::fixed
      << seconds_since(start) << "s";
  return {rho >= 0.95 && earlier >= 15, oss.str()};
}

// --- 7. Nearest-neighbor sanity on MUTAG. ---

Outcome criterion7() {
  const auto root = find_dataset("MUTAG");
  if (!root) return {false, missing_dataset_note("MUTAG")};
  const auto start = std::chrono::steady_clock::now();
  const auto ds = wwls::parse_tud_dataset(*root, "MUTAG");
  const wwls::HashParams params(wwls::kDefaultModulus, 2, 2, 1);
  const auto dist = wwls::pairwise_matrix(ds, params, wwls::MatrixMode::distance,
                                          0.0, wwls::SolverSpec{}, 0);
  const auto report = wwls::knn_eval(dist, ds.class_labels, 1);

  std::vector<std::pair<int, int>> counts;
  for (int label : ds.class_labels) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& c) { return c.first == label; });
    if (it == counts.end())
      counts.emplace_back(label, 1);
    else
      ++it->second;
  }
  int majority = 0;
  for (const auto& [label, count] : counts) majority = std::max(majority, count);
  const double majority_rate =
      static_cast<double>(majority) / static_cast<double>(ds.graphs.size());

  const double elapsed = seconds_since(start);
  std::ostringstream oss;
  oss << "leave-one-out 1-NN accuracy " << report.accuracy
      << " vs majority rate " << majority_rate << " (need >= +0.10); "
      << std::fixed << elapsed << "s (limit 600)";
  return {report.accuracy >= majority_rate + 0.10 && elapsed < 600.0,
          oss.str()};
}

// --- 8. Byte-identical reruns of every command. ---

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(WWLS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

Outcome criterion8() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("wwls-gate-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  struct Case {
    const char* name;
    std::string args;
    std::string out;
  };
  std::vector<Case> cases;
  const auto out_path = [&](const char* file) { return (dir / file).string(); };
  cases.push_back({"distance",
                   "distance --gen random --n 10 --p 0.3 --count 4 --h 2 "
                   "--seed 5 --out ",
                   out_path("d.csv")});
  cases.push_back({"kernel",
                   "kernel --gen random --n 10 --p 0.3 --count 4 --h 2 "
                   "--gamma 0.2 --seed 5 --format json --out ",
                   out_path("k.json")});
  cases.push_back({"hash-stats",
                   "hash-stats --gen random --n 12 --p 0.3 --count 3 --h 3 "
                   "--seed 5 --out ",
                   out_path("s.csv")});
  cases.push_back({"noise",
                   "noise --gen random --n 10 --p 0.3 --mode rewire "
                   "--max-noise 3 --trials 2 --h 1 --seed 5 --out ",
                   out_path("n.csv")});
  cases.push_back({"knn",
                   "knn --gen random --n 9 --p 0.35 --count 5 --h 2 "
                   "--neighbors 1 --seed 5 --out ",
                   out_path("q.json")});

  std::ostringstream oss;
  bool ok = true;
  for (const auto& c : cases) {
    std::string first, first_meta;
    for (int round = 0; round < 2; ++round) {
      if (run_cli(c.args + c.out) != 0) {
        ok = false;
        oss << c.name << " exited nonzero; ";
        break;
      }
      std::string body, meta;
      try {
        body = wwls_test::read_file(c.out);
        meta = wwls_test::read_file(c.out + ".meta.json");
      } catch (const std::exception& e) {
        ok = false;
        oss << c.name << ": " << e.what() << "; ";
        break;
      }
      if (round == 0) {
        first = body;
        first_meta = meta;
      } else if (body != first || meta != first_meta) {
        ok = false;
        oss << c.name << " rerun differed; ";
      }
    }
  }
  std::filesystem::remove_all(dir);
  if (ok)
    oss << "all five commands rerun byte-identical (outputs and metadata "
           "sidecars)";
  return {ok, oss.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
      if (selected < 1 || selected > 8) {
        std::fprintf(stderr, "criterion must be 1..8\n");
        return 64;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 64;
    }
  }

  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "benchmark type counts", criterion1},
      {2, "hash/oracle agreement", criterion2},
      {3, "edit-distance sandwich", criterion3},
      {4, "transport exactness", criterion4},
      {5, "distance axioms", criterion5},
      {6, "noise response", criterion6},
      {7, "nearest-neighbor sanity", criterion7},
      {8, "rerun determinism", criterion8},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    if (selected != 0 && entry.id != selected) continue;
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unexpected error: ") + e.what()};
    }
    std::printf("%s: criterion %d (%s) - %s\n",
                outcome.pass ? "PASS" : "FAIL", entry.id, entry.name,
                outcome.detail.c_str());
    if (!outcome.pass) ++failures;
  }
  return failures;
}
