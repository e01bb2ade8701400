#include "wwls/wl_hash.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "rand_util.hpp"

namespace wwls {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  // Deterministic Miller-Rabin for 64-bit inputs with the 12-prime base set.
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

HashParams::HashParams(std::uint64_t modulus, int slots, int iterations,
                       std::uint64_t seed)
    : modulus_(modulus), slots_(slots), iterations_(iterations), seed_(seed) {
  if (!is_prime_u64(modulus))
    throw std::invalid_argument("HashParams: modulus " +
                                std::to_string(modulus) + " is not prime");
  if (modulus >= (1ULL << 30))
    throw std::invalid_argument(
        "HashParams: modulus must stay below 2^30 so squared terms fit the "
        "overflow guard");
  if (slots < 1) throw std::invalid_argument("HashParams: slots must be >= 1");
  if (iterations < 0)
    throw std::invalid_argument("HashParams: iterations must be >= 0");

  std::mt19937_64 rng(seed);
  x_.resize(static_cast<std::size_t>(slots) * iterations);
  xp_.resize(x_.size());
  for (int s = 0; s < slots; ++s)
    for (int d = 0; d < iterations; ++d) {
      x_[static_cast<std::size_t>(s) * iterations + d] =
          detail::uniform_below(rng, modulus);
      xp_[static_cast<std::size_t>(s) * iterations + d] =
          detail::uniform_below(rng, modulus);
    }

  u64 fp = detail::mix_seed(modulus, 0x77);
  fp = detail::mix_seed(fp ^ static_cast<u64>(slots), 0x78);
  fp = detail::mix_seed(fp ^ static_cast<u64>(iterations), 0x79);
  fp = detail::mix_seed(fp ^ seed, 0x7a);
  fingerprint_ = fp;
}

std::uint64_t HashParams::var_x(int slot, int depth) const {
  if (slot < 0 || slot >= slots_ || depth < 0 || depth >= iterations_)
    throw std::out_of_range("HashParams::var_x: slot/depth out of range");
  return x_[static_cast<std::size_t>(slot) * iterations_ + depth];
}

std::uint64_t HashParams::var_xp(int slot, int depth) const {
  if (slot < 0 || slot >= slots_ || depth < 0 || depth >= iterations_)
    throw std::out_of_range("HashParams::var_xp: slot/depth out of range");
  return xp_[static_cast<std::size_t>(slot) * iterations_ + depth];
}

namespace {

// Shared DFS core: residues of the subtree rooted at u sitting at depth d of
// the unfolding around the original root, for depth budget h (h may be below
// params.iterations(); the depth-d variable pair is the same either way).
// Childless nodes (depth cutoff or isolated root) take the leaf rule: label
// mod M in every slot, height 0.
std::vector<u64> dfs_residues(const Graph& g, int u, int d, int h,
                              const HashParams& params, SubtreeMultiset* sink) {
  const int k = params.slots();
  const u64 m = params.modulus();
  std::vector<u64> res(k);
  if (d == h || g.degree(u) == 0) {
    const u64 leaf = static_cast<u64>(g.label(u)) % m;
    std::fill(res.begin(), res.end(), leaf);
    if (sink) ++(*sink)[SubtreeKey{0, res}];
    return res;
  }
  std::vector<u64> prod(k, 1);
  for (int w : g.neighbors(u)) {
    const auto child = dfs_residues(g, w, d + 1, h, params, sink);
    for (int s = 0; s < k; ++s)
      prod[s] = mulmod(prod[s], (params.var_x(s, d) + child[s]) % m, m);
  }
  const u64 lab = static_cast<u64>(g.label(u)) % m;
  for (int s = 0; s < k; ++s)
    res[s] = mulmod((params.var_xp(s, d) + lab) % m, prod[s], m);
  if (sink) ++(*sink)[SubtreeKey{h - d, res}];
  return res;
}

}  // namespace

SubtreeMultiset node_subtree_hashes(const Graph& g, int v,
                                    const HashParams& params) {
  g.neighbors(v);  // range check
  SubtreeMultiset out;
  dfs_residues(g, v, 0, params.iterations(), params, &out);
  return out;
}

SubtreeKey root_subtree_key(const Graph& g, int v, const HashParams& params,
                            int h) {
  if (h < 0 || h > params.iterations())
    throw std::invalid_argument(
        "root_subtree_key: h must lie in [0, params.iterations()]");
  g.neighbors(v);
  auto res = dfs_residues(g, v, 0, h, params, nullptr);
  const int height = (h > 0 && g.degree(v) > 0) ? h : 0;
  return SubtreeKey{height, std::move(res)};
}

std::vector<SubtreeKey> graph_root_keys(const Graph& g,
                                        const HashParams& params, int h) {
  if (h < 0 || h > params.iterations())
    throw std::invalid_argument(
        "graph_root_keys: h must lie in [0, params.iterations()]");
  const int n = g.node_count();
  const int k = params.slots();
  const u64 m = params.modulus();

  std::vector<u64> leaf(n);
  for (int v = 0; v < n; ++v) leaf[v] = static_cast<u64>(g.label(v)) % m;

  // cur[v * k + s] = slot-s residue of the subtree rooted at v at depth d.
  std::vector<u64> cur(static_cast<std::size_t>(n) * k), next(cur.size());
  for (int v = 0; v < n; ++v)
    for (int s = 0; s < k; ++s) cur[static_cast<std::size_t>(v) * k + s] = leaf[v];

  for (int d = h - 1; d >= 0; --d) {
    for (int v = 0; v < n; ++v) {
      auto* out = &next[static_cast<std::size_t>(v) * k];
      if (g.degree(v) == 0) {
        for (int s = 0; s < k; ++s) out[s] = leaf[v];
        continue;
      }
      for (int s = 0; s < k; ++s) {
        u64 prod = 1;
        const u64 x = params.var_x(s, d);
        for (int w : g.neighbors(v))
          prod = mulmod(prod, (x + cur[static_cast<std::size_t>(w) * k + s]) % m, m);
        out[s] = mulmod((params.var_xp(s, d) + leaf[v]) % m, prod, m);
      }
    }
    std::swap(cur, next);
  }

  std::vector<SubtreeKey> keys(n);
  for (int v = 0; v < n; ++v) {
    const int height = (h > 0 && g.degree(v) > 0) ? h : 0;
    keys[v] = SubtreeKey{
        height, std::vector<u64>(cur.begin() + static_cast<std::size_t>(v) * k,
                                 cur.begin() + static_cast<std::size_t>(v + 1) * k)};
  }
  return keys;
}

namespace {

std::string canonical_encoding(const Graph& g, int u, int d, int h,
                               std::map<std::string, std::int64_t>* sink) {
  std::string enc = "(" + std::to_string(g.label(u));
  if (d != h && g.degree(u) != 0) {
    std::vector<std::string> child;
    child.reserve(g.neighbors(u).size());
    for (int w : g.neighbors(u))
      child.push_back(canonical_encoding(g, w, d + 1, h, sink));
    std::sort(child.begin(), child.end());
    for (const auto& c : child) enc += c;
  }
  enc += ")";
  if (sink) ++(*sink)[enc];
  return enc;
}

}  // namespace

std::map<std::string, std::int64_t> canonical_subtree_encodings(const Graph& g,
                                                                int v, int h) {
  if (h < 0)
    throw std::invalid_argument("canonical_subtree_encodings: negative h");
  g.neighbors(v);
  std::map<std::string, std::int64_t> out;
  canonical_encoding(g, v, 0, h, &out);
  return out;
}

namespace {

struct VecIntHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : v) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(x));
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Dataset-wide AHU-style interning: a tuple (label, sorted child type ids)
// gets one id; identical tuples share it.
class CanonicalInterner {
 public:
  int intern(std::vector<int> key) {
    const auto [it, inserted] =
        table_.try_emplace(std::move(key), static_cast<int>(table_.size()));
    (void)inserted;
    return it->second;
  }

 private:
  std::unordered_map<std::vector<int>, int, VecIntHash> table_;
};

// ids[r][v] = canonical type id of the depth-r unfolding rooted at v.
std::vector<std::vector<int>> graph_canonical_levels(const Graph& g, int h_max,
                                                     CanonicalInterner& pool) {
  const int n = g.node_count();
  std::vector<std::vector<int>> ids(h_max + 1, std::vector<int>(n));
  for (int v = 0; v < n; ++v) ids[0][v] = pool.intern({g.label(v)});
  for (int r = 1; r <= h_max; ++r) {
    for (int v = 0; v < n; ++v) {
      if (g.degree(v) == 0) {
        ids[r][v] = ids[0][v];
        continue;
      }
      std::vector<int> key;
      key.reserve(g.neighbors(v).size() + 1);
      key.push_back(g.label(v));
      for (int w : g.neighbors(v)) key.push_back(ids[r - 1][w]);
      std::sort(key.begin() + 1, key.end());
      ids[r][v] = pool.intern(std::move(key));
    }
  }
  return ids;
}

}  // namespace

std::vector<std::vector<std::vector<int>>> wl_relabel_joint(
    std::span<const Graph> graphs, int h) {
  if (h < 0) throw std::invalid_argument("wl_relabel_joint: negative h");
  std::vector<std::vector<std::vector<int>>> feats(graphs.size());
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    feats[gi].resize(graphs[gi].node_count());
    for (int v = 0; v < graphs[gi].node_count(); ++v) {
      feats[gi][v].resize(h + 1);
      feats[gi][v][0] = graphs[gi].label(v);
    }
  }
  for (int t = 1; t <= h; ++t) {
    // Fresh dictionary per iteration; ids follow first appearance.
    std::unordered_map<std::vector<int>, int, VecIntHash> dict;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const Graph& g = graphs[gi];
      for (int v = 0; v < g.node_count(); ++v) {
        std::vector<int> key;
        key.reserve(g.neighbors(v).size() + 1);
        key.push_back(feats[gi][v][t - 1]);
        for (int w : g.neighbors(v)) key.push_back(feats[gi][w][t - 1]);
        std::sort(key.begin() + 1, key.end());
        const auto [it, inserted] =
            dict.try_emplace(std::move(key), static_cast<int>(dict.size()));
        (void)inserted;
        feats[gi][v][t] = it->second;
      }
    }
  }
  return feats;
}

std::vector<std::vector<int>> wl_relabel(const Graph& g, int h) {
  auto joint = wl_relabel_joint(std::span<const Graph>(&g, 1), h);
  return std::move(joint[0]);
}

std::size_t count_subtree_types(const LabeledDataset& ds, int h,
                                const HashParams& params, CountMethod method) {
  if (h < 0) throw std::invalid_argument("count_subtree_types: negative h");
  switch (method) {
    case CountMethod::hash: {
      std::set<SubtreeKey> types;
      for (const Graph& g : ds.graphs)
        for (auto& key : graph_root_keys(g, params, h))
          types.insert(std::move(key));
      return types.size();
    }
    case CountMethod::canonical: {
      CanonicalInterner pool;
      std::unordered_set<int> types;
      for (const Graph& g : ds.graphs) {
        const auto levels = graph_canonical_levels(g, h, pool);
        types.insert(levels[h].begin(), levels[h].end());
      }
      return types.size();
    }
    case CountMethod::wl: {
      const auto feats = wl_relabel_joint(ds.graphs, h);
      std::unordered_set<int> types;
      for (const auto& graph_feats : feats)
        for (const auto& node_feats : graph_feats) types.insert(node_feats[h]);
      return types.size();
    }
  }
  throw std::invalid_argument("count_subtree_types: unknown method");
}

TypeAudit audit_subtree_types(const LabeledDataset& ds, int h,
                              const HashParams& params) {
  CanonicalInterner pool;
  std::unordered_map<int, SubtreeKey> first_key;
  std::unordered_set<int> split_ids;
  std::set<SubtreeKey> hash_types;
  for (const Graph& g : ds.graphs) {
    const auto levels = graph_canonical_levels(g, h, pool);
    auto keys = graph_root_keys(g, params, h);
    for (int v = 0; v < g.node_count(); ++v) {
      const int cid = levels[h][v];
      hash_types.insert(keys[v]);
      const auto [it, inserted] = first_key.try_emplace(cid, keys[v]);
      if (!inserted && it->second != keys[v]) split_ids.insert(cid);
    }
  }
  TypeAudit audit;
  audit.canonical_types = first_key.size();
  audit.hash_types = hash_types.size();
  audit.splits = split_ids.size();
  audit.collisions = audit.canonical_types - audit.hash_types;
  return audit;
}

std::vector<HashStatsRow> hash_stats(const LabeledDataset& ds, int h_max,
                                     std::uint64_t modulus,
                                     std::uint64_t seed) {
  if (h_max < 1) throw std::invalid_argument("hash_stats: h_max must be >= 1");

  std::vector<HashStatsRow> rows(h_max);
  for (int h = 1; h <= h_max; ++h) rows[h - 1].h = h;

  const auto feats = wl_relabel_joint(ds.graphs, h_max);
  for (int h = 1; h <= h_max; ++h) {
    std::unordered_set<int> types;
    for (const auto& graph_feats : feats)
      for (const auto& node_feats : graph_feats) types.insert(node_feats[h]);
    rows[h - 1].wl = types.size();
  }

  {
    CanonicalInterner pool;
    std::vector<std::unordered_set<int>> types(h_max + 1);
    for (const Graph& g : ds.graphs) {
      const auto levels = graph_canonical_levels(g, h_max, pool);
      for (int h = 1; h <= h_max; ++h)
        types[h].insert(levels[h].begin(), levels[h].end());
    }
    for (int h = 1; h <= h_max; ++h) rows[h - 1].canonical = types[h].size();
  }

  for (int h = 1; h <= h_max; ++h) {
    for (int k : {1, 2}) {
      const HashParams params(modulus, k, h, seed);
      std::set<SubtreeKey> types;
      for (const Graph& g : ds.graphs)
        for (auto& key : graph_root_keys(g, params, h))
          types.insert(std::move(key));
      (k == 1 ? rows[h - 1].hash_k1 : rows[h - 1].hash_k2) = types.size();
    }
  }
  return rows;
}

}  // namespace wwls
