#include "wwls/tud_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>
#include <vector>

namespace wwls {

ParseError::ParseError(const std::filesystem::path& file, std::size_t line,
                       const std::string& what)
    : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " +
                         what) {}

namespace {

// All lines of a text file, CR stripped, trailing blank lines dropped.
std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file, 0, "cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") ==
                               std::string::npos)
    lines.pop_back();
  return lines;
}

long parse_int(const std::string& token, const std::filesystem::path& file,
               std::size_t line) {
  const auto begin = token.find_first_not_of(" \t");
  const auto end = token.find_last_not_of(" \t");
  if (begin == std::string::npos)
    throw ParseError(file, line, "empty field");
  long value = 0;
  const char* first = token.data() + begin;
  const char* last = token.data() + end + 1;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(file, line,
                     "expected integer, got '" + token.substr(begin, end - begin + 1) + "'");
  return value;
}

std::pair<long, long> parse_pair(const std::string& s,
                                 const std::filesystem::path& file,
                                 std::size_t line) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw ParseError(file, line, "expected 'i, j' pair");
  return {parse_int(s.substr(0, comma), file, line),
          parse_int(s.substr(comma + 1), file, line)};
}

}  // namespace

LabeledDataset parse_tud_dataset(const std::filesystem::path& root,
                                 const std::string& name) {
  const auto file_a = root / (name + "_A.txt");
  const auto file_ind = root / (name + "_graph_indicator.txt");
  const auto file_glab = root / (name + "_graph_labels.txt");
  const auto file_nlab = root / (name + "_node_labels.txt");

  const auto ind_lines = read_lines(file_ind);
  const long total_nodes = static_cast<long>(ind_lines.size());
  std::vector<long> graph_of(total_nodes);  // 1-based graph ids
  long num_graphs = 0;
  for (long i = 0; i < total_nodes; ++i) {
    const long gid = parse_int(ind_lines[i], file_ind, i + 1);
    if (gid < 1)
      throw ParseError(file_ind, i + 1,
                       "graph id must be >= 1, got " + std::to_string(gid));
    graph_of[i] = gid;
    num_graphs = std::max(num_graphs, gid);
  }

  // Local index of each global node within its graph, in file order.
  std::vector<int> local_of(total_nodes);
  std::vector<int> graph_size(num_graphs, 0);
  for (long i = 0; i < total_nodes; ++i)
    local_of[i] = graph_size[graph_of[i] - 1]++;

  std::vector<int> node_labels(total_nodes, 0);
  if (std::filesystem::exists(file_nlab)) {
    const auto nlab_lines = read_lines(file_nlab);
    if (static_cast<long>(nlab_lines.size()) != total_nodes)
      throw ParseError(file_nlab, nlab_lines.size(),
                       "expected " + std::to_string(total_nodes) +
                           " node labels, got " +
                           std::to_string(nlab_lines.size()));
    for (long i = 0; i < total_nodes; ++i) {
      const long l = parse_int(nlab_lines[i], file_nlab, i + 1);
      if (l < 0)
        throw ParseError(file_nlab, i + 1,
                         "negative node label " + std::to_string(l));
      node_labels[i] = static_cast<int>(l);
    }
  }

  const auto glab_lines = read_lines(file_glab);
  if (static_cast<long>(glab_lines.size()) != num_graphs)
    throw ParseError(file_glab, glab_lines.size(),
                     "expected " + std::to_string(num_graphs) +
                         " graph labels, got " +
                         std::to_string(glab_lines.size()));

  LabeledDataset ds;
  ds.name = name;
  ds.graphs.reserve(num_graphs);
  for (long g = 0; g < num_graphs; ++g)
    ds.graphs.emplace_back(graph_size[g]);
  std::vector<std::vector<int>> labels_per_graph(num_graphs);
  for (long g = 0; g < num_graphs; ++g)
    labels_per_graph[g].resize(graph_size[g]);
  for (long i = 0; i < total_nodes; ++i)
    labels_per_graph[graph_of[i] - 1][local_of[i]] = node_labels[i];
  for (long g = 0; g < num_graphs; ++g)
    ds.graphs[g].set_labels(std::move(labels_per_graph[g]));

  const auto a_lines = read_lines(file_a);
  for (std::size_t li = 0; li < a_lines.size(); ++li) {
    const auto [gi, gj] = parse_pair(a_lines[li], file_a, li + 1);
    if (gi < 1 || gi > total_nodes || gj < 1 || gj > total_nodes)
      throw ParseError(file_a, li + 1,
                       "edge endpoint out of range: (" + std::to_string(gi) +
                           ", " + std::to_string(gj) + ")");
    if (gi == gj)
      throw ParseError(file_a, li + 1,
                       "self-loop at node " + std::to_string(gi));
    if (graph_of[gi - 1] != graph_of[gj - 1])
      throw ParseError(file_a, li + 1,
                       "edge crosses graphs " +
                           std::to_string(graph_of[gi - 1]) + " and " +
                           std::to_string(graph_of[gj - 1]));
    Graph& g = ds.graphs[graph_of[gi - 1] - 1];
    const int u = local_of[gi - 1], v = local_of[gj - 1];
    if (!g.has_edge(u, v)) g.add_edge(u, v);
  }

  ds.class_labels.resize(num_graphs);
  for (long g = 0; g < num_graphs; ++g)
    ds.class_labels[g] =
        static_cast<int>(parse_int(glab_lines[g], file_glab, g + 1));
  return ds;
}

void write_tud_dataset(const std::filesystem::path& root,
                       const LabeledDataset& ds) {
  std::filesystem::create_directories(root);
  const auto& name = ds.name;
  std::ofstream a(root / (name + "_A.txt"));
  std::ofstream ind(root / (name + "_graph_indicator.txt"));
  std::ofstream glab(root / (name + "_graph_labels.txt"));
  std::ofstream nlab(root / (name + "_node_labels.txt"));
  if (!a || !ind || !glab || !nlab)
    throw std::runtime_error("write_tud_dataset: cannot open output files in " +
                             root.string());

  long offset = 0;
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const Graph& graph = ds.graphs[g];
    for (int u = 0; u < graph.node_count(); ++u) {
      ind << (g + 1) << "\n";
      nlab << graph.label(u) << "\n";
      std::vector<int> nbrs(graph.neighbors(u).begin(),
                            graph.neighbors(u).end());
      std::sort(nbrs.begin(), nbrs.end());
      for (int v : nbrs)
        a << (offset + u + 1) << ", " << (offset + v + 1) << "\n";
    }
    glab << ds.class_labels[g] << "\n";
    offset += graph.node_count();
  }
}

}  // namespace wwls
