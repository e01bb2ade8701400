#include "wwls/bocs.hpp"

#include <stdexcept>

namespace wwls {

BocsVector::BocsVector(const SubtreeMultiset& counts, const HashParams& params)
    : fingerprint_(params.fingerprint()) {
  entries_.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    if (count < 0)
      throw std::invalid_argument("BocsVector: negative multiplicity");
    if (count > 0) entries_.emplace_back(key, count);
  }
  // SubtreeMultiset is ordered, so entries_ is already sorted by key.
}

std::int64_t BocsVector::mass() const {
  std::int64_t total = 0;
  for (const auto& [key, count] : entries_) total += count;
  return total;
}

std::int64_t l1_ted(const BocsVector& a, const BocsVector& b) {
  if (a.params_fingerprint() != b.params_fingerprint())
    throw std::invalid_argument(
        "l1_ted: feature vectors built from different hash parameters");
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t i = 0, j = 0;
  std::int64_t sum = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first < eb[j].first) {
      sum += ea[i].second;
      ++i;
    } else if (eb[j].first < ea[i].first) {
      sum += eb[j].second;
      ++j;
    } else {
      const std::int64_t d = ea[i].second - eb[j].second;
      sum += d < 0 ? -d : d;
      ++i;
      ++j;
    }
  }
  for (; i < ea.size(); ++i) sum += ea[i].second;
  for (; j < eb.size(); ++j) sum += eb[j].second;
  return sum;
}

}  // namespace wwls
