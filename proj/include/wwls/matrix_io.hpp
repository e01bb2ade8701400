#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wwls/wwls.hpp"

namespace wwls {

// %.17g rendering shared by every writer, so reruns are byte-identical and
// round-trips preserve the value exactly.
std::string format_double(double v);

// Bare n x n matrix, one row per line, comma separators, no header.
void write_matrix_csv(const std::filesystem::path& path,
                      const PairwiseMatrix& m);

// {"mode": ..., "n": ..., "values": [[...], ...]} with stable key order.
void write_matrix_json(const std::filesystem::path& path,
                       const PairwiseMatrix& m);

std::vector<std::vector<double>> read_matrix_csv(
    const std::filesystem::path& path);

}  // namespace wwls
