#include "wwls/tiny_tree.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wwls {

int TinyTree::root() const {
  for (int i = 0; i < size(); ++i)
    if (parent[i] < 0) return i;
  throw std::invalid_argument("TinyTree: no root");
}

std::vector<std::vector<int>> TinyTree::children() const {
  std::vector<std::vector<int>> ch(size());
  for (int i = 0; i < size(); ++i)
    if (parent[i] >= 0) ch[parent[i]].push_back(i);
  return ch;
}

void TinyTree::validate() const {
  const int n = size();
  if (n == 0) throw std::invalid_argument("TinyTree: empty tree");
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("TinyTree: label count mismatch");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    if (parent[i] < 0) {
      ++roots;
      continue;
    }
    if (parent[i] >= n)
      throw std::invalid_argument("TinyTree: parent index out of range");
  }
  if (roots != 1)
    throw std::invalid_argument("TinyTree: expected exactly one root, found " +
                                std::to_string(roots));
  for (int l : labels)
    if (l < 0) throw std::invalid_argument("TinyTree: negative label");
  for (int i = 0; i < n; ++i) {
    int steps = 0, u = i;
    while (parent[u] >= 0) {
      u = parent[u];
      if (++steps > n) throw std::invalid_argument("TinyTree: parent cycle");
    }
  }
}

TinyTree unfolding_tree(const Graph& g, int v, int h) {
  if (h < 0) throw std::invalid_argument("unfolding_tree: negative h");
  g.neighbors(v);
  constexpr int kNodeCap = 100000;
  TinyTree t;
  auto expand = [&](auto&& self, int u, int d, int parent_idx) -> void {
    const int idx = t.size();
    if (idx >= kNodeCap)
      throw std::runtime_error("unfolding_tree: tree exceeds node cap");
    t.parent.push_back(parent_idx);
    t.labels.push_back(g.label(u));
    if (d == h) return;
    for (int w : g.neighbors(u)) self(self, w, d + 1, idx);
  };
  expand(expand, v, 0, -1);
  return t;
}

namespace {

// Proper-ancestor table via parent chains.
std::vector<std::vector<bool>> ancestor_table(const TinyTree& t) {
  const int n = t.size();
  std::vector<std::vector<bool>> anc(n, std::vector<bool>(n, false));
  for (int v = 0; v < n; ++v)
    for (int u = t.parent[v]; u >= 0; u = t.parent[u]) anc[u][v] = true;
  return anc;
}

std::vector<int> preorder(const TinyTree& t) {
  const auto ch = t.children();
  std::vector<int> order;
  order.reserve(t.size());
  auto walk = [&](auto&& self, int u) -> void {
    order.push_back(u);
    for (int c : ch[u]) self(self, c);
  };
  walk(walk, t.root());
  return order;
}

struct TedSearch {
  const TinyTree& t1;
  const TinyTree& t2;
  std::vector<std::vector<bool>> anc1, anc2;
  std::vector<int> order;
  int m, n;
  int best;
  std::vector<std::pair<int, int>> assigned;

  TedSearch(const TinyTree& a, const TinyTree& b)
      : t1(a),
        t2(b),
        anc1(ancestor_table(a)),
        anc2(ancestor_table(b)),
        order(preorder(a)),
        m(a.size()),
        n(b.size()),
        best(m + n) {}

  bool consistent(int a, int b) const {
    for (const auto& [pa, pb] : assigned) {
      if (anc1[pa][a] != anc2[pb][b]) return false;
      if (anc1[a][pa] != anc2[b][pb]) return false;
    }
    return true;
  }

  void run(int idx, unsigned used2, int relabels, int mapped) {
    if (idx == m) {
      best = std::min(best, relabels + (m - mapped) + (n - mapped));
      return;
    }
    const int rem = m - idx;
    const int unmatched_t2_floor = std::max(0, n - mapped - rem);
    if (relabels + (idx - mapped) + unmatched_t2_floor >= best) return;

    const int a = order[idx];
    for (int b = 0; b < n; ++b) {
      if (used2 & (1u << b)) continue;
      if (!consistent(a, b)) continue;
      assigned.emplace_back(a, b);
      run(idx + 1, used2 | (1u << b), relabels + (t1.labels[a] != t2.labels[b]),
          mapped + 1);
      assigned.pop_back();
    }
    run(idx + 1, used2, relabels, mapped);  // leave a unmapped
  }
};

}  // namespace

int exact_ted(const TinyTree& t1, const TinyTree& t2) {
  t1.validate();
  t2.validate();
  if (t1.size() > 8 || t2.size() > 8)
    throw std::invalid_argument(
        "exact_ted: exhaustive search capped at 8 nodes per tree");
  TedSearch search(t1, t2);
  search.run(0, 0u, 0, 0);
  return search.best;
}

namespace {

std::string tree_encoding(const TinyTree& t,
                          const std::vector<std::vector<int>>& ch, int u,
                          std::map<std::string, std::int64_t>& sink) {
  std::string enc = "(" + std::to_string(t.labels[u]);
  std::vector<std::string> parts;
  parts.reserve(ch[u].size());
  for (int c : ch[u]) parts.push_back(tree_encoding(t, ch, c, sink));
  std::sort(parts.begin(), parts.end());
  for (const auto& p : parts) enc += p;
  enc += ")";
  ++sink[enc];
  return enc;
}

}  // namespace

std::map<std::string, std::int64_t> tree_subtree_encodings(const TinyTree& t) {
  t.validate();
  std::map<std::string, std::int64_t> out;
  const auto ch = t.children();
  tree_encoding(t, ch, t.root(), out);
  return out;
}

std::int64_t tree_l1_ted(const TinyTree& t1, const TinyTree& t2) {
  const auto e1 = tree_subtree_encodings(t1);
  const auto e2 = tree_subtree_encodings(t2);
  std::int64_t sum = 0;
  auto i1 = e1.begin();
  auto i2 = e2.begin();
  while (i1 != e1.end() && i2 != e2.end()) {
    if (i1->first < i2->first) {
      sum += i1->second;
      ++i1;
    } else if (i2->first < i1->first) {
      sum += i2->second;
      ++i2;
    } else {
      sum += std::abs(i1->second - i2->second);
      ++i1;
      ++i2;
    }
  }
  for (; i1 != e1.end(); ++i1) sum += i1->second;
  for (; i2 != e2.end(); ++i2) sum += i2->second;
  return sum;
}

bool check_ted_bound(const TinyTree& t1, const TinyTree& t2, int h) {
  if (h < 0) throw std::invalid_argument("check_ted_bound: negative h");
  const std::int64_t d_phi = tree_l1_ted(t1, t2);
  const std::int64_t ted = exact_ted(t1, t2);
  // d_phi / (2h + 2) <= ted <= d_phi, kept in integers.
  return d_phi <= ted * (2 * static_cast<std::int64_t>(h) + 2) && ted <= d_phi;
}

}  // namespace wwls
