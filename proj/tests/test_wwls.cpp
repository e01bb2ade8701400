#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "wwls/wwls.hpp"

using namespace wwls;

namespace {

const HashParams kParams(kDefaultModulus, 2, 2, 31);

}  // namespace

TEST_CASE("ground matrix is the pairwise feature distance") {
  Graph g1 = wwls_test::random_labeled_graph(6, 0.4, 3, 1);
  Graph g2 = wwls_test::random_labeled_graph(8, 0.4, 3, 2);
  const auto b1 = graph_bocs(g1, kParams);
  const auto b2 = graph_bocs(g2, kParams);
  const auto gm = ground_matrix(b1, b2);
  CHECK(gm.rows == 6);
  CHECK(gm.cols == 8);
  for (std::size_t i = 0; i < gm.rows; ++i)
    for (std::size_t j = 0; j < gm.cols; ++j)
      CHECK(gm.at(i, j) == l1_ted(b1[i], b2[j]));
  // Swapping arguments transposes it.
  const auto gm_t = ground_matrix(b2, b1);
  for (std::size_t i = 0; i < gm.rows; ++i)
    for (std::size_t j = 0; j < gm.cols; ++j)
      CHECK(gm.at(i, j) == gm_t.at(j, i));
}

TEST_CASE("distance of a graph to itself is exactly zero") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = wwls_test::random_labeled_graph(12, 0.3, 3, seed);
    CHECK(wwls_distance(g, g, kParams) == 0.0);
  }
}

TEST_CASE("distance to a node-permuted copy is exactly zero") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Graph g = wwls_test::random_labeled_graph(15, 0.3, 3, seed + 10);
    Graph pg = permute_nodes(g, wwls_test::random_permutation(15, seed + 90));
    CHECK(wwls_distance(g, pg, kParams) == 0.0);
  }
}

TEST_CASE("distance is symmetric to machine precision") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Graph g1 = wwls_test::random_labeled_graph(10, 0.3, 3, seed + 20);
    Graph g2 = wwls_test::random_labeled_graph(13, 0.3, 3, seed + 40);
    const double ab = wwls_distance(g1, g2, kParams);
    const double ba = wwls_distance(g2, g1, kParams);
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("single-node graphs with different labels sit at distance two") {
  Graph a(1, {}, {0});
  Graph b(1, {}, {5});
  CHECK(wwls_distance(a, b, kParams) == doctest::Approx(2.0));
  CHECK(wwls_distance(a, a, kParams) == 0.0);
}

TEST_CASE("empty graphs are rejected") {
  Graph empty;
  Graph g = wwls_test::random_labeled_graph(4, 0.5, 2, 1);
  CHECK_THROWS_AS(wwls_distance(empty, g, kParams), std::invalid_argument);
  CHECK_THROWS_AS(graph_bocs(empty, kParams), std::invalid_argument);
}

TEST_CASE("sinkhorn distance tracks the exact one") {
  SolverSpec approx;
  approx.kind = SolverKind::sinkhorn;
  approx.epsilon = 1e-2;
  approx.max_iter = 200000;
  approx.tol = 1e-9;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Graph g1 = wwls_test::random_labeled_graph(8, 0.35, 3, seed + 60);
    Graph g2 = wwls_test::random_labeled_graph(9, 0.35, 3, seed + 70);
    const double exact = wwls_distance(g1, g2, kParams);
    const double sk = wwls_distance(g1, g2, kParams, approx);
    if (exact > 0.0)
      CHECK(std::abs(sk - exact) / exact <= 0.02);
  }
}

TEST_CASE("transport plan surfaces marginals and convergence") {
  Graph g1 = wwls_test::random_labeled_graph(6, 0.4, 3, 3);
  Graph g2 = wwls_test::random_labeled_graph(7, 0.4, 3, 4);
  const auto plan = wwls_transport(g1, g2, kParams);
  CHECK(plan.converged);
  const auto rows = plan.row_marginals();
  for (double r : rows) CHECK(r == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  SolverSpec starved;
  starved.kind = SolverKind::sinkhorn;
  starved.max_iter = 1;
  starved.tol = 1e-15;
  const auto flagged = wwls_transport(g1, g2, kParams, starved);
  CHECK_FALSE(flagged.converged);
}

TEST_CASE("baseline distance: identical and single-node cases") {
  Graph g = wwls_test::random_labeled_graph(10, 0.3, 3, 5);
  CHECK(wwl_baseline_distance(g, g, 3) == 0.0);
  // Different singleton labels mismatch in every refinement coordinate.
  Graph a(1, {}, {0});
  Graph b(1, {}, {5});
  for (int h : {0, 1, 4}) CHECK(wwl_baseline_distance(a, b, h) == 1.0);
  CHECK(wwl_baseline_distance(a, a, 2) == 0.0);
}

TEST_CASE("baseline distance is permutation-invariant and symmetric") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g1 = wwls_test::random_labeled_graph(9, 0.3, 3, seed + 80);
    Graph g2 = wwls_test::random_labeled_graph(11, 0.3, 3, seed + 85);
    Graph pg1 =
        permute_nodes(g1, wwls_test::random_permutation(9, seed + 95));
    CHECK(wwl_baseline_distance(g1, pg1, 2) == 0.0);
    CHECK(wwl_baseline_distance(g1, g2, 2) ==
          doctest::Approx(wwl_baseline_distance(g2, g1, 2)).epsilon(1e-12));
  }
}

TEST_CASE("kernel values decay with distance") {
  Graph g1 = wwls_test::random_labeled_graph(8, 0.4, 3, 6);
  Graph g2 = wwls_test::random_labeled_graph(8, 0.4, 3, 7);
  const double d = wwls_distance(g1, g2, kParams);
  CHECK(kernel_value(g1, g2, kParams, 0.1) == doctest::Approx(std::exp(-0.1 * d)));
  CHECK(kernel_value(g1, g1, kParams, 0.1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(kernel_value(g1, g2, kParams, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_value(g1, g2, kParams, -1.0), std::invalid_argument);
}

TEST_CASE("pairwise matrix is symmetric with the declared diagonal") {
  LabeledDataset ds;
  ds.name = "pm";
  for (int i = 0; i < 6; ++i) {
    ds.graphs.push_back(wwls_test::random_labeled_graph(8, 0.35, 3, 100 + i));
    ds.class_labels.push_back(i % 2);
  }
  const auto dist = pairwise_matrix(ds, kParams, MatrixMode::distance, 0.0,
                                    SolverSpec{}, 2);
  const auto kern = pairwise_matrix(ds, kParams, MatrixMode::kernel, 0.05,
                                    SolverSpec{}, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(dist.at(i, i) == 0.0);
    CHECK(kern.at(i, i) == 1.0);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(dist.at(i, j) == dist.at(j, i));
      CHECK(kern.at(i, j) ==
            doctest::Approx(std::exp(-0.05 * dist.at(i, j))).epsilon(1e-12));
    }
  }
  // Thread count does not change values.
  const auto dist1 = pairwise_matrix(ds, kParams, MatrixMode::distance, 0.0,
                                     SolverSpec{}, 1);
  CHECK(dist.values == dist1.values);
  CHECK_THROWS_AS(pairwise_matrix(LabeledDataset{}, kParams,
                                  MatrixMode::distance, 0.0, SolverSpec{}, 1),
                  std::invalid_argument);
}

TEST_CASE("nearest neighbors separate well-separated clusters") {
  // Two families: sparse rings vs dense blobs, loosely varied per member.
  LabeledDataset ds;
  ds.name = "clusters";
  for (int i = 0; i < 5; ++i) {
    Graph ring = gen_cycle(10 + i);
    ds.graphs.push_back(assign_degree_labels(ring));
    ds.class_labels.push_back(0);
  }
  for (int i = 0; i < 5; ++i) {
    Graph blob = gen_random_graph(10 + i, 0.8, 500 + i);
    ds.graphs.push_back(assign_degree_labels(blob));
    ds.class_labels.push_back(1);
  }
  const auto dist = pairwise_matrix(ds, kParams, MatrixMode::distance, 0.0,
                                    SolverSpec{}, 0);
  const auto report = knn_eval(dist, ds.class_labels, 1);
  CHECK(report.accuracy == doctest::Approx(1.0));
  int total = 0;
  for (const auto& [pair, count] : report.confusion) {
    CHECK(pair.first == pair.second);
    total += count;
  }
  CHECK(total == 10);
}

TEST_CASE("knn validates its inputs and breaks ties deterministically") {
  PairwiseMatrix dist;
  dist.n = 4;
  dist.mode = MatrixMode::distance;
  dist.values = {0, 1, 1, 5,
                 1, 0, 2, 5,
                 1, 2, 0, 5,
                 5, 5, 5, 0};
  const std::vector<int> labels{7, 3, 3, 7};
  CHECK_THROWS_AS(knn_eval(dist, {1, 2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(knn_eval(dist, labels, 0), std::invalid_argument);
  CHECK_THROWS_AS(knn_eval(dist, labels, 4), std::invalid_argument);

  // Query 0 with k = 2: neighbors 1 and 2, both class 3 -> predicted 3.
  // Query 3 with k = 2: all distances tie at 5; sorting falls back to index,
  // so neighbors are 0 (class 7) and 1 (class 3); the vote ties 1-1 and both
  // mean distances tie at 5, so the lower class id 3 wins.
  const auto report = knn_eval(dist, labels, 2);
  bool saw_query3 = false;
  for (const auto& [pair, count] : report.confusion)
    if (pair.first == 7 && pair.second == 3) saw_query3 = true;
  CHECK(saw_query3);
}
