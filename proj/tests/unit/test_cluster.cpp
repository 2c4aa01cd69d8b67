#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "algotune/cluster.hpp"
#include "doctest.h"

using namespace algotune;

namespace {

ClusterInstance random_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {u(rng), u(rng)};
  return ClusterInstance::euclidean(pts);
}

// Lance-Williams linkage: keep a cluster distance table and update it with
// min (single) or max (complete). Returns merges as (min id A, min id B).
std::vector<std::pair<int, int>> linkage_oracle(const ClusterInstance& inst, bool single) {
  const int n = inst.n();
  std::vector<std::vector<double>> D(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) D[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = inst.d(a, b);
  std::vector<int> alive(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) alive[static_cast<std::size_t>(i)] = i;  // representative = min id
  std::vector<std::pair<int, int>> out;
  while (alive.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bp = 0, bq = 0;
    for (std::size_t p = 0; p < alive.size(); ++p)
      for (std::size_t q = p + 1; q < alive.size(); ++q) {
        const double v = D[static_cast<std::size_t>(alive[p])][static_cast<std::size_t>(alive[q])];
        if (v < best) {
          best = v;
          bp = p;
          bq = q;
        }
      }
    const auto a = static_cast<std::size_t>(alive[bp]), b = static_cast<std::size_t>(alive[bq]);
    out.emplace_back(alive[bp], alive[bq]);
    for (int c : alive) {
      const auto cc = static_cast<std::size_t>(c);
      D[a][cc] = D[cc][a] = single ? std::min(D[a][cc], D[b][cc]) : std::max(D[a][cc], D[b][cc]);
    }
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(bq));
  }
  return out;
}

std::vector<std::pair<int, int>> min_id_pairs(const ClusterTree& t) {
  std::vector<std::pair<int, int>> out;
  for (const auto& m : t.merges)
    out.emplace_back(t.members[static_cast<std::size_t>(m.left)][0], t.members[static_cast<std::size_t>(m.right)][0]);
  return out;
}

// Every pruning of the subtree at v, as lists of node ids.
std::vector<std::vector<int>> prunings(const ClusterTree& t, int v) {
  std::vector<std::vector<int>> out{{v}};
  if (v < t.n) return out;
  const auto& m = t.merges[static_cast<std::size_t>(v - t.n)];
  for (const auto& l : prunings(t, m.left))
    for (const auto& r : prunings(t, m.right)) {
      auto x = l;
      x.insert(x.end(), r.begin(), r.end());
      out.push_back(std::move(x));
    }
  return out;
}

}  // namespace

TEST_CASE("merge_value families") {
  const ClusterInstance inst({{0, 1, 4}, {1, 0, 2}, {4, 2, 0}});
  const std::vector<int> a{0}, b{1, 2};
  CHECK(merge_value(MergeFamily::C2, 1.0, a, b, inst) == 1.0);
  CHECK(merge_value(MergeFamily::C2, 0.0, a, b, inst) == 4.0);
  CHECK(merge_value(MergeFamily::C2, 0.25, a, b, inst) == doctest::Approx(3.25));
  CHECK(merge_value(MergeFamily::C3, 1.0, a, b, inst) == doctest::Approx(2.5));
  CHECK(merge_value(MergeFamily::C3, 0.0, a, b, inst) == doctest::Approx(2.0));
  CHECK(merge_value(MergeFamily::C3, std::numeric_limits<double>::infinity(), a, b, inst) == 4.0);
  CHECK(merge_value(MergeFamily::C1, -std::numeric_limits<double>::infinity(), a, b, inst) == 1.0);
  CHECK(merge_value(MergeFamily::C1, 1.0, a, b, inst) == doctest::Approx(5.0));
  CHECK(merge_value(MergeFamily::C1, 2.0, a, b, inst) == doctest::Approx(std::sqrt(17.0)));
  CHECK(merge_value(MergeFamily::C1, -1.0, a, b, inst) == doctest::Approx(0.8));
  CHECK_THROWS_AS(merge_value(MergeFamily::C1, 0.0, a, b, inst), std::invalid_argument);
  CHECK_THROWS_AS(merge_value(MergeFamily::C2, 1.5, a, b, inst), std::invalid_argument);
  CHECK_THROWS_AS(ClusterInstance({{0, -1}, {-1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterInstance({{0, 1}, {2, 0}}), std::invalid_argument);

  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto r = random_points(rng, 6);
    const std::vector<int> x{0, 1}, y{2, 3, 4, 5};
    double mx = 0;
    for (int p : x)
      for (int q : y) mx = std::max(mx, r.d(p, q));
    CHECK(std::fabs(merge_value(MergeFamily::C1, 1e6, x, y, r) - mx) <= 1e-9 * std::max(1.0, mx));
    CHECK(std::isfinite(merge_value(MergeFamily::C1, 800.0, x, y, r)));
    CHECK(std::isfinite(merge_value(MergeFamily::C3, -800.0, x, y, r)));
    double prev = -1;
    for (double rho : {-50.0, -3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 30.0, 400.0}) {
      const double v = merge_value(MergeFamily::C3, rho, x, y, r);
      CHECK(v >= prev - 1e-12 * std::max(1.0, v));
      prev = v;
    }
  }
}

TEST_CASE("agglomerate") {
  const ClusterInstance two({{0, 3}, {3, 0}});
  CHECK(agglomerate(two, MergeFamily::C2, 0.5).merges == std::vector<Merge>{{0, 1}});

  const auto line = ClusterInstance::euclidean({{0}, {1}, {3}});
  for (double rho : {0.0, 0.3, 1.0}) {
    const auto t = agglomerate(line, MergeFamily::C2, rho);
    CHECK(t.merges[0] == Merge{0, 1});
    CHECK(t.merges[1] == Merge{3, 2});
    CHECK(t.members[4] == std::vector<int>{0, 1, 2});
  }
  // Ties break towards the lexicographically smallest pair.
  const ClusterInstance flat({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  CHECK(agglomerate(flat, MergeFamily::C3, 1.0).merges[0] == Merge{0, 1});

  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_points(rng, 3 + t % 8);
    CHECK(min_id_pairs(agglomerate(inst, MergeFamily::C2, 1.0)) == linkage_oracle(inst, true));
    CHECK(min_id_pairs(agglomerate(inst, MergeFamily::C2, 0.0)) == linkage_oracle(inst, false));
    CHECK(min_id_pairs(agglomerate(inst, MergeFamily::C1, -std::numeric_limits<double>::infinity())) ==
          linkage_oracle(inst, true));
    CHECK(agglomerate(inst, MergeFamily::C3, 0.7) == agglomerate(inst, MergeFamily::C3, 0.7));
  }
}

TEST_CASE("prune_tree") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + t % 7;
    const auto inst = random_points(rng, n);
    const auto tree = agglomerate(inst, MergeFamily::C3, 1.0);
    const auto all = prunings(tree, tree.root());
    for (int k = 1; k <= n; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : all) {
        if (static_cast<int>(p.size()) != k) continue;
        double c = 0;
        for (int v : p) c += kmedian_cost(tree.members[static_cast<std::size_t>(v)], inst);
        best = std::min(best, c);
      }
      const auto got = prune_tree(tree, k, inst);
      CHECK(got.clusters.size() == static_cast<std::size_t>(k));
      CHECK(got.cost == doctest::Approx(best));
      double c = 0;
      std::size_t covered = 0;
      for (const auto& cl : got.clusters) {
        c += kmedian_cost(cl, inst);
        covered += cl.size();
      }
      CHECK(c == doctest::Approx(got.cost));
      CHECK(covered == static_cast<std::size_t>(n));
    }
    CHECK(prune_tree(tree, n, inst).cost == 0.0);
    CHECK(prune_tree(tree, 1, inst).clusters[0] == tree.members.back());
    CHECK_THROWS_AS(prune_tree(tree, 0, inst), std::invalid_argument);
    CHECK_THROWS_AS(prune_tree(tree, n + 1, inst), std::invalid_argument);
  }
}

TEST_CASE("c2_breakpoints") {
  std::vector<std::vector<double>> eq(5, std::vector<double>(5, 2.0));
  for (int i = 0; i < 5; ++i) eq[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0;
  const ClusterInstance flat(eq);
  const auto u0 = pair_agreement_utility(flat, {0, 0, 1, 1, 1}, 2);
  CHECK(c2_decomposition(flat, u0).partition.size() == 1);
  CHECK(c2_breakpoints(flat, u0).size() == 1);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    const int n = 4 + t % 9;
    const auto inst = random_points(rng, n);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) labels.push_back(i % 2);
    const auto util = pair_agreement_utility(inst, labels, 2);
    const auto d = c2_decomposition(inst, util);
    CHECK(static_cast<double>(d.partition.size()) <= std::pow(n, 8) + 1);
    const auto f = c2_breakpoints(inst, util);
    for (int k = 0; k < 100; ++k) {
      const double rho = u(rng);
      const auto direct = agglomerate(inst, MergeFamily::C2, rho);
      const auto& piece = d.partition.pieces()[d.partition.piece_index(rho)];
      CHECK(direct == d.trees[static_cast<std::size_t>(piece.tag)]);
      CHECK(f(rho) == doctest::Approx(util(direct)));
    }
  }
}

TEST_CASE("cluster instance reader") {
  std::istringstream m("0,1\n1,0\n");
  CHECK(read_cluster_instance(m, false).d(0, 1) == 1.0);
  std::istringstream p("0,0\n3,4\n");
  CHECK(read_cluster_instance(p, true).d(1, 0) == doctest::Approx(5.0));
  std::istringstream bad("0,x\n");
  CHECK_THROWS_AS(read_cluster_instance(bad, false), std::invalid_argument);
}
