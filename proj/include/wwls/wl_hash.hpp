#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wwls/graph.hpp"

namespace wwls {

inline constexpr std::uint64_t kDefaultModulus = 1000000007ULL;

// Shared randomness for the polynomial subtree hash: for each of `slots`
// independent repetitions, one (x_d, x'_d) variable pair per depth
// d = 0..iterations-1, drawn uniformly from [0, modulus). modulus must be an
// odd prime below 2^30 so products fit comfortably in 128-bit intermediates.
class HashParams {
 public:
  HashParams(std::uint64_t modulus, int slots, int iterations,
             std::uint64_t seed);

  std::uint64_t modulus() const { return modulus_; }
  int slots() const { return slots_; }
  int iterations() const { return iterations_; }
  std::uint64_t seed() const { return seed_; }

  std::uint64_t var_x(int slot, int depth) const;
  std::uint64_t var_xp(int slot, int depth) const;

  // Stable digest of (modulus, slots, iterations, seed); lets feature vectors
  // refuse mixing across parameter sets.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::uint64_t modulus_ = 0;
  int slots_ = 0;
  int iterations_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> x_;   // slot-major: x_[slot * iterations + depth]
  std::vector<std::uint64_t> xp_;
  std::uint64_t fingerprint_ = 0;
};

bool is_prime_u64(std::uint64_t n);

// Identity of one complete subtree: its height plus one residue per slot.
// Height tagging keeps subtrees of different heights distinct by construction.
struct SubtreeKey {
  int height = 0;
  std::vector<std::uint64_t> residues;

  bool operator==(const SubtreeKey&) const = default;
  auto operator<=>(const SubtreeKey&) const = default;
};

// key -> multiplicity. Ordered so iteration (and serialization) is stable.
using SubtreeMultiset = std::map<SubtreeKey, std::int64_t>;

// Single DFS over the depth-h unfolding tree of v (h = params.iterations):
// every node expands to all its graph neighbors, parent included, until depth
// h. Emits the hash key of every complete subtree encountered, with
// multiplicity. The tree itself is never materialized. Cost grows like
// sum over depths of deg^depth.
SubtreeMultiset node_subtree_hashes(const Graph& g, int v,
                                    const HashParams& params);

// Key of the root subtree only (the full depth-h unfolding around v).
SubtreeKey root_subtree_key(const Graph& g, int v, const HashParams& params,
                            int h);

// Bottom-up evaluation of root_subtree_key for every node at once; values are
// identical to the per-node DFS (same recurrence, different evaluation order).
std::vector<SubtreeKey> graph_root_keys(const Graph& g,
                                        const HashParams& params, int h);

// Hash-free canonical identities for the same complete subtrees: each subtree
// becomes "(" + label + sorted child encodings + ")". Exact but large; the
// collision oracle for the hashed keys.
std::map<std::string, std::int64_t> canonical_subtree_encodings(const Graph& g,
                                                                int v, int h);

// Classic WL color refinement, h iterations. features[v] has h+1 entries:
// entry 0 is the raw label, entry t the compressed id at iteration t. Each
// iteration uses a fresh injective dictionary with ids starting at 0.
std::vector<std::vector<int>> wl_relabel(const Graph& g, int h);

// Same refinement with one dictionary per iteration shared across graphs, so
// ids are comparable between graphs.
std::vector<std::vector<std::vector<int>>> wl_relabel_joint(
    std::span<const Graph> graphs, int h);

enum class CountMethod { hash, canonical, wl };

// Distinct identities of the depth-h root subtrees T(v) over all nodes of the
// dataset, under the chosen identity function.
std::size_t count_subtree_types(const LabeledDataset& ds, int h,
                                const HashParams& params, CountMethod method);

// Pairs every node's canonical root identity with its hashed key and compares
// the two partitions. `splits` (one canonical type mapping to two keys) is
// impossible by construction and reported only as a self-check.
struct TypeAudit {
  std::size_t canonical_types = 0;
  std::size_t hash_types = 0;
  std::size_t collisions = 0;  // canonical_types - hash_types
  std::size_t splits = 0;
};

TypeAudit audit_subtree_types(const LabeledDataset& ds, int h,
                              const HashParams& params);

// One row per h in 1..h_max: type counts via WL refinement, canonical
// encodings, and hashed keys at slot counts 1 and 2 (both seeded with `seed`).
struct HashStatsRow {
  int h = 0;
  std::size_t wl = 0;
  std::size_t canonical = 0;
  std::size_t hash_k1 = 0;
  std::size_t hash_k2 = 0;
};

std::vector<HashStatsRow> hash_stats(const LabeledDataset& ds, int h_max,
                                     std::uint64_t modulus,
                                     std::uint64_t seed);

}  // namespace wwls
