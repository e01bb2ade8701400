#pragma once

#include <cstdint>
#include <vector>

#include "wwls/wl_hash.hpp"

namespace wwls {

// Bag-of-complete-subtrees feature vector: sparse nonnegative counts over
// SubtreeKey, tied to the HashParams that produced the keys.
class BocsVector {
 public:
  BocsVector() = default;
  BocsVector(const SubtreeMultiset& counts, const HashParams& params);

  const std::vector<std::pair<SubtreeKey, std::int64_t>>& entries() const {
    return entries_;
  }
  std::uint64_t params_fingerprint() const { return fingerprint_; }
  std::int64_t mass() const;        // sum of counts = node count of the tree
  std::size_t support() const { return entries_.size(); }

 private:
  std::vector<std::pair<SubtreeKey, std::int64_t>> entries_;  // sorted by key
  std::uint64_t fingerprint_ = 0;
};

// L1 distance over the union of supports. Throws std::invalid_argument when
// the vectors come from different HashParams.
std::int64_t l1_ted(const BocsVector& a, const BocsVector& b);

}  // namespace wwls
