#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "algotune/rnafold.hpp"
#include "doctest.h"

using namespace algotune;

namespace {

// Every valid folding of positions 1..n.
std::vector<Folding> all_foldings(int n) {
  std::vector<Folding> out;
  std::vector<std::pair<int, int>> cur;
  std::function<void(int, int, std::function<void()>)> rec;
  // Enumerates foldings of [a, b], calling k() for each completed one.
  rec = [&](int a, int b, std::function<void()> k) {
    if (a > b) {
      k();
      return;
    }
    rec(a + 1, b, k);
    for (int j = a + 2; j <= b; ++j) {
      cur.emplace_back(a, j);
      rec(a + 1, j - 1, [&, j, b, k] { rec(j + 1, b, k); });
      cur.pop_back();
    }
  };
  rec(1, n, [&] { out.push_back(make_folding(cur, n)); });
  return out;
}

RnaSequence random_rna(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> b(0, 3);
  RnaSequence s;
  for (int i = 0; i < n; ++i) s.bases.push_back(b(rng));
  return s;
}

StackScores random_scores(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 2);
  StackScores m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) m.set(a, b, c, d, u(rng));
  return m;
}

}  // namespace

TEST_CASE("fold small cases") {
  auto two = fold(parse_rna("AU"), 0.5, StackScores::watson_crick());
  CHECK(two.folding.pairs.empty());
  CHECK(two.objective == 0);
  auto four = fold(parse_rna("GAUC"), 1.0, StackScores::watson_crick());
  CHECK(four.folding.size() == 1);
  CHECK(four.objective == doctest::Approx(1));
  CHECK_THROWS(fold(parse_rna("GAUC"), 1.5, StackScores{}));
  CHECK_THROWS(parse_rna("GAXC"));
}

TEST_CASE("fold matches exhaustive search including the tie-break") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<Folding>> cache(13);
  for (int n = 1; n <= 12; ++n) cache[static_cast<std::size_t>(n)] = all_foldings(n);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = len(rng);
    auto s = random_rna(rng, n);
    auto m = trial % 3 == 0 ? StackScores::watson_crick() : random_scores(rng);
    const double rho = trial % 5 == 0 ? 0.5 : u(rng);
    const Folding* best = nullptr;
    double best_v = -1e300;
    for (const auto& f : cache[static_cast<std::size_t>(n)]) {
      const double v = fold_objective(s, f, rho, m);
      const bool better = !best || v > best_v + 1e-12 ||
                          (std::fabs(v - best_v) <= 1e-12 &&
                           (f.size() < best->size() || (f.size() == best->size() && f.pairs < best->pairs)));
      if (better) {
        best = &f;
        best_v = v;
      }
    }
    auto r = fold(s, rho, m);
    CHECK(r.objective == doctest::Approx(best_v).epsilon(1e-9));
    CHECK(r.folding == *best);
  }
}

TEST_CASE("max stack by size matches exhaustive search") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = len(rng);
    auto s = random_rna(rng, n);
    auto m = random_scores(rng);
    std::map<int, double> want;
    for (const auto& f : all_foldings(n)) {
      const int k = static_cast<int>(f.size());
      const double st = stacking_score(s, f, m);
      if (!want.count(k) || st > want[k]) want[k] = st;
    }
    auto got = max_stack_by_size(s, m);
    REQUIRE(got.size() == want.size());
    for (const auto& [k, st] : got) CHECK(st == doctest::Approx(want[k]).epsilon(1e-9));
  }
  auto zero = max_stack_by_size(parse_rna("GGGAAAUCC"), StackScores{});
  CHECK(zero.front().k == 0);
  for (const auto& e : zero) CHECK(e.stack == 0);
}

TEST_CASE("rho breakpoints agree with fold") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + trial % 15;
    auto s = random_rna(rng, n);
    auto m = trial % 2 ? StackScores::watson_crick() : random_scores(rng);
    auto env = rho_breakpoints(s, m);
    CHECK(env.size() <= static_cast<std::size_t>(n / 2 + 1));
    for (int k = 0; k < 100; ++k) {
      const double rho = u(rng);
      auto r = fold(s, rho, m);
      CHECK(r.objective == doctest::Approx(env(rho)).epsilon(1e-9));
      const auto sizes = max_stack_by_size(s, m);
      for (const auto& e : sizes)
        if (e.k == static_cast<int>(r.folding.size())) CHECK(e.stack >= stacking_score(s, r.folding, m) - 1e-9);
    }
  }
  // With M = 0 all lines pass through the origin; the largest k wins on (0, 1].
  auto s = parse_rna("GGGAAACCCAAAUUU");
  auto env = rho_breakpoints(s, StackScores{});
  CHECK(env.size() == 1);
  const int kmax = max_stack_by_size(s, StackScores{}).back().k;
  CHECK(env(0.5) == doctest::Approx(0.5 * kmax));
}

TEST_CASE("pair utility and utility breakpoints") {
  auto truth = make_folding({{1, 6}, {2, 5}});
  CHECK(pair_utility(truth, truth) == 1);
  CHECK(pair_utility(make_folding({{1, 6}}), truth) == 0.5);
  CHECK(pair_utility(make_folding({{7, 10}}), truth) == 0);
  CHECK(pair_utility(make_folding({}), Folding{}) == 1);
  CHECK_THROWS(make_folding({{1, 4}, {2, 6}}));
  CHECK_THROWS(make_folding({{1, 2}}));

  auto s = parse_rna("GGGAAACCC");
  auto m = StackScores{};
  auto t = fold(s, 1.0, m).folding;
  auto u = rna_utility_breakpoints(s, m, t);
  CHECK(u.size() == 1);
  CHECK(u(0.3) == 1);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = random_rna(rng, 14);
    auto sc = random_scores(rng);
    auto truth2 = fold(r, 0.3, sc).folding;
    auto f = rna_utility_breakpoints(r, sc, truth2);
    CHECK(f.size() <= 8);
    for (const auto& p : f.pieces()) CHECK((p.intercept >= 0 && p.intercept <= 1));
  }
}

TEST_CASE("stack score csv and folding json") {
  std::istringstream in("b1,b2,b3,b4,score\nG,C,G,C,2.5\nA,U,C,G,-1\n");
  auto m = read_stack_scores(in);
  CHECK(m(3, 2, 3, 2) == 2.5);
  CHECK(m(0, 1, 2, 3) == -1);
  CHECK(m(0, 0, 0, 0) == 0);
  std::istringstream bad("G,C,G,X,1\nG,C,G,Q,1\n");
  CHECK_THROWS(read_stack_scores(bad));
  auto f = make_folding({{2, 9}, {3, 8}});
  CHECK(folding_from_json(to_json(f), 10) == f);
  CHECK(to_json(f).dump() == R"({"pairs":[[2,9],[3,8]]})");
}
