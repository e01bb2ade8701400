#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wwls/graph.hpp"

namespace wwls {

// Explicit rooted unordered labeled tree, small enough for exhaustive search.
// parent[i] is the index of node i's parent; exactly one root with parent -1.
struct TinyTree {
  std::vector<int> parent;
  std::vector<int> labels;

  int size() const { return static_cast<int>(parent.size()); }
  int root() const;
  std::vector<std::vector<int>> children() const;
  void validate() const;  // throws std::invalid_argument on malformed input
};

// Materialized depth-h unfolding tree of v (same expansion rule as the
// hashed traversal). Intended for tiny instances; node count grows like
// deg^h.
TinyTree unfolding_tree(const Graph& g, int v, int h);

// Exact unordered tree edit distance, unit costs (relabel / insert / delete):
// minimum over one-to-one, ancestor-preserving partial node mappings of
// (#relabels + #unmapped in t1 + #unmapped in t2). Exhaustive search with
// pruning; throws std::invalid_argument if either tree exceeds 8 nodes.
int exact_ted(const TinyTree& t1, const TinyTree& t2);

// Multiset of canonical encodings of every complete subtree of t.
std::map<std::string, std::int64_t> tree_subtree_encodings(const TinyTree& t);

// Type-exact L1 distance between the complete-subtree bags of two trees.
std::int64_t tree_l1_ted(const TinyTree& t1, const TinyTree& t2);

// True iff  d_phi / (2h + 2)  <=  exact_ted  <=  d_phi  for height budget h,
// with d_phi computed type-exactly (no hashing involved).
bool check_ted_bound(const TinyTree& t1, const TinyTree& t2, int h);

}  // namespace wwls
