#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "wwls/graph.hpp"

namespace wwls {

// File-level failure while reading a dataset: carries path and 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& file, std::size_t line,
             const std::string& what);
};

// Reads <root>/<name>_A.txt, _graph_indicator.txt, _graph_labels.txt and the
// optional _node_labels.txt. Node ids in the files are 1-based and global;
// each returned Graph is renumbered 0-based. Edge lists may list each edge in
// one or both directions; duplicates collapse. Missing node-label file means
// all labels zero.
LabeledDataset parse_tud_dataset(const std::filesystem::path& root,
                                 const std::string& name);

// Inverse of parse_tud_dataset: writes the four files for ds under root.
// Deterministic byte output for a given dataset.
void write_tud_dataset(const std::filesystem::path& root,
                       const LabeledDataset& ds);

}  // namespace wwls
