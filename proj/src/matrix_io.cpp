#include "wwls/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace wwls {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path,
                      const PairwiseMatrix& m) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_matrix_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j) out << ",";
      out << format_double(m.at(i, j));
    }
    out << "\n";
  }
}

void write_matrix_json(const std::filesystem::path& path,
                       const PairwiseMatrix& m) {
  nlohmann::ordered_json doc;
  doc["mode"] = m.mode == MatrixMode::kernel ? "kernel" : "distance";
  doc["n"] = m.n;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.n; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.n; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_matrix_json: cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

std::vector<std::vector<double>> read_matrix_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_matrix_csv: cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      row.push_back(std::stod(line.substr(start, comma - start)));
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wwls
