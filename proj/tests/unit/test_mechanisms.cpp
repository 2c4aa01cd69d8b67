#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "algotune/mechanisms.hpp"
#include "doctest.h"

using namespace algotune;

namespace {

using Matrix = std::vector<std::vector<double>>;

// Straight-line payment oracle on dense matrices.
std::vector<double> oracle_payments(const Matrix& v, const std::vector<double>& rho) {
  const std::size_t n = v.size(), m = v[0].size();
  auto best = [&](int skip) {
    std::size_t arg = 0;
    double top = -1e300;
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (static_cast<int>(i) != skip) s += rho[i] * v[i][j];
      if (s > top) {
        top = s;
        arg = j;
      }
    }
    return arg;
  };
  const std::size_t star = best(-1);
  std::vector<double> p(n, 0.0);
  double total = 0;
  int sink = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (rho[i] == 0) {
      if (sink < 0) sink = static_cast<int>(i);
      continue;
    }
    const std::size_t alt = best(static_cast<int>(i));
    double a = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) {
        a += rho[k] * v[k][star];
        b += rho[k] * v[k][alt];
      }
    p[i] = (a - b) / rho[i];
    total += p[i];
  }
  p[static_cast<std::size_t>(sink)] = -total;
  return p;
}

struct RandomNam {
  Matrix v;
  NamParams p;
};

RandomNam random_nam(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dn(2, 8), dm(2, 5);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = dn(rng), m = dm(rng);
  RandomNam r;
  r.v.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
  for (auto& row : r.v)
    for (auto& x : row) x = u(rng);
  r.p.weights.resize(static_cast<std::size_t>(n));
  for (auto& w : r.p.weights) w = u(rng) < 0.25 ? 0.0 : u(rng) * 3;
  r.p.weights[std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(n - 1))(rng)] = 0.0;
  return r;
}

}  // namespace

TEST_CASE("nam outcome and payments") {
  const auto zero = ValuationProfile::dense({{0, 0}, {0, 0}});
  CHECK(nam_outcome(zero, NamParams{{1, 0}}) == 0);
  CHECK(nam_welfare(zero, NamParams{{1, 0}}) == 0.0);

  const auto two = ValuationProfile::dense({{1, 2}, {5, 0}});
  const auto p2 = nam_payments(two, NamParams{{1, 0}});
  CHECK(p2 == std::vector<double>{0.0, 0.0});

  const auto v = ValuationProfile::dense({{3, 0}, {0, 2}, {0, 0}});
  const auto p = nam_payments(v, NamParams{{1, 1, 0}});
  CHECK(nam_outcome(v, NamParams{{1, 1, 0}}) == 0);
  CHECK(p[0] == doctest::Approx(-2));
  CHECK(p[1] == doctest::Approx(0));
  CHECK(p[2] == doctest::Approx(2));

  CHECK_THROWS_AS(nam_payments(v, NamParams{{1, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(nam_outcome(v, NamParams{{1, -1, 0}}), std::invalid_argument);
}

TEST_CASE("nam payments: oracle agreement, budget balance, scaling") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    const auto r = random_nam(rng);
    const auto prof = ValuationProfile::dense(r.v);
    const auto pay = nam_payments(prof, r.p);
    const auto ref = oracle_payments(r.v, r.p.weights);
    double sum = 0;
    for (std::size_t i = 0; i < pay.size(); ++i) {
      CHECK(pay[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      sum += pay[i];
    }
    CHECK(std::fabs(sum) <= 1e-12);
    NamParams scaled = r.p;
    for (auto& w : scaled.weights) w *= 3.5;
    CHECK(nam_outcome(prof, scaled) == nam_outcome(prof, r.p));
  }
}

TEST_CASE("nam incentive compatibility under the transfer reading") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  while (checked < 1000) {
    const auto r = random_nam(rng);
    std::vector<int> active;
    for (std::size_t i = 0; i < r.p.weights.size(); ++i)
      if (r.p.weights[i] > 0) active.push_back(static_cast<int>(i));
    if (active.empty()) continue;
    const auto i = static_cast<std::size_t>(active[std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(rng)]);
    Matrix lie = r.v;
    for (auto& x : lie[i]) x = u(rng) * 2;
    const auto truth = ValuationProfile::dense(r.v);
    const auto mis = ValuationProfile::dense(lie);
    const double honest = r.v[i][static_cast<std::size_t>(nam_outcome(truth, r.p))] + nam_payments(truth, r.p)[i];
    const double cheat = r.v[i][static_cast<std::size_t>(nam_outcome(mis, r.p))] + nam_payments(mis, r.p)[i];
    CHECK(honest >= cheat - 1e-9);
    ++checked;
  }
}

TEST_CASE("nam shattering construction") {
  const double eps = 0.25;
  const auto s = nam_shatter_instances(6, eps);
  REQUIRE(s.profiles.size() == 3);
  const Matrix alt1 = {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}};
  const Matrix alt2 = {{0, 0, 0, eps, 0, 0}, {0, 0, 0, 0, eps, 0}, {0, 0, 0, 0, 0, eps}};
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 6; ++i) {
      CHECK(s.profiles[static_cast<std::size_t>(l)].value(i, 0) == alt1[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]);
      CHECK(s.profiles[static_cast<std::size_t>(l)].value(i, 1) == alt2[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]);
    }
  REQUIRE(s.params.size() == 8);
  for (std::size_t b = 0; b < 8; ++b)
    for (std::size_t l = 0; l < 3; ++l) {
      const double w = nam_welfare(s.profiles[l], s.params[b]);
      CHECK(w == ((b >> l) & 1u ? 1.0 : eps));
      if ((b >> l) & 1u) CHECK(nam_outcome(s.profiles[l], s.params[b]) == 0);
    }

  // Generic certificate path.
  std::vector<Evaluator> fns;
  for (const auto& prof : s.profiles)
    fns.push_back([prof](std::span<const double> w) { return nam_welfare(prof, NamParams{{w.begin(), w.end()}}); });
  std::vector<std::vector<double>> cands;
  for (const auto& p : s.params) cands.push_back(p.weights);
  const auto cert = verify_shattering(fns, s.witnesses, cands);
  CHECK(cert.shattered);
  CHECK(cert.pattern_count() == 8);
  CHECK(verify_nam_shattering(s).shattered);

  const auto one = nam_shatter_instances(2, eps);
  CHECK(nam_welfare(one.profiles[0], NamParams{{1, 0}}) == 1.0);
  CHECK(nam_welfare(one.profiles[0], NamParams{{0, 1}}) == eps);
  for (int n : {2, 4, 8, 20}) CHECK(verify_nam_shattering(nam_shatter_instances(n, 0.1)).shattered);
  CHECK(nam_shatter_instances(34, 0.1).params.empty());
  CHECK_THROWS_AS(nam_shatter_instances(5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(nam_shatter_instances(4, 0.5), std::invalid_argument);
}

TEST_CASE("spa revenue") {
  const std::vector<double> b{0.8, 0.5};
  CHECK(spa_revenue(b, ReserveVector{{0.6}}) == doctest::Approx(0.6));
  CHECK(spa_revenue(b, ReserveVector{{0.9}}) == 0.0);
  CHECK(spa_revenue(b, ReserveVector{{0.0}}) == doctest::Approx(0.5));
  CHECK(spa_revenue(b, ReserveVector{{0.9, 0.1}}) == 0.0);
  CHECK(spa_revenue(b, ReserveVector{{0.7, 0.1}}) == doctest::Approx(0.7));
  // Equal top bids: lowest index wins and faces its own reserve.
  CHECK(spa_revenue(std::vector<double>{0.5, 0.5}, ReserveVector{{0.6, 0.1}}) == 0.0);
  CHECK_THROWS_AS(spa_revenue(std::vector<double>{0.5}, ReserveVector{{0.1}}), std::invalid_argument);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> bids(5);
    for (auto& x : bids) x = u(rng);
    auto sorted = bids;
    std::sort(sorted.rbegin(), sorted.rend());
    const double rho = u(rng);
    const double closed = sorted[0] >= rho ? std::max(sorted[1], rho) : 0.0;
    CHECK(spa_revenue(bids, ReserveVector{{rho}}) == closed);
    // The sparse single-item profile gives the same revenue.
    std::vector<ValuationProfile::Entry> e;
    for (int i = 0; i < 5; ++i) e.push_back({i + 2, 0, bids[static_cast<std::size_t>(i)]});
    CHECK(spa_revenue(ValuationProfile(9, 1, e), ReserveVector{{rho}}) == closed);
  }
}

TEST_CASE("anonymous reserve dual") {
  const std::vector<double> b{0.8, 0.5};
  const auto f = anonymous_reserve_dual(b, 1.0);
  REQUIRE(f.breakpoints() == std::vector<double>{0.5, 0.8});
  CHECK(f.pieces()[0] == Piece{0.0, 0.5, 0});
  CHECK(f.pieces()[1] == Piece{1.0, 0.0, 0});
  CHECK(f.pieces()[2] == Piece{0.0, 0.0, 0});

  const auto tie = anonymous_reserve_dual(std::vector<double>{0.6, 0.6, 0.1}, 1.0);
  CHECK(tie.size() == 2);
  CHECK(tie(0.3) == 0.6);
  CHECK(tie(0.7) == 0.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> bids(5);
    for (auto& x : bids) x = u(rng);
    const auto d = anonymous_reserve_dual(bids, 1.0);
    for (int k = 0; k < 20; ++k) {
      CHECK(count_oscillations(d, u(rng)) <= 2);
      const double rho = u(rng);
      CHECK(d(rho) == doctest::Approx(spa_revenue(bids, ReserveVector{{rho}})));
    }
  }
}

TEST_CASE("overfit constructions") {
  const std::vector<double> w{0.3, 0.9, 0.5};
  const auto dist = spa_distribution_from_values(w);
  std::vector<ValuationProfile> sample{dist.support[1], dist.support[1]};
  const auto r = overfit_reserves(sample, w);
  CHECK(r.values == std::vector<double>{0.75, 0.9, 0.75});
  CHECK(overfit_reserves(std::vector<ValuationProfile>{}, w).values == std::vector<double>(3, 0.75));
  std::vector<ValuationProfile> bad{ValuationProfile(3, 1, {{0, 0, 0.4}})};
  CHECK_THROWS_AS(overfit_reserves(bad, w), std::invalid_argument);

  auto p = nam_overfit_params({0, 1, 2}, 3);
  CHECK(p.weights == std::vector<double>{1, 1, 1, 0, 0, 0});
  p = nam_overfit_params({}, 3);
  CHECK(p.weights == std::vector<double>{0, 0, 0, 1, 1, 1});
  p = nam_overfit_params({1}, 3);
  CHECK(p.weights == std::vector<double>{0, 1, 0, 1, 0, 1});
}

TEST_CASE("finite distributions and expectations") {
  const std::vector<double> w{0.3, 0.9};
  const auto d = build_spa_distribution(w, 1);
  CHECK(d.support.size() == 2);
  CHECK(d.probabilities == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(build_spa_distribution(w, 2), std::invalid_argument);

  const auto syn = synthetic_spa_values(5334, 5278, 1);
  const auto big = build_spa_distribution(syn);
  CHECK(big.support.size() == 10612);
  big.validate();
  const double rho = 0.6;
  double closed = 0;
  for (double x : syn) closed += x >= rho ? rho : 0.0;
  closed /= static_cast<double>(syn.size());
  CHECK(expected_utility(big, [&](const ValuationProfile& v) { return spa_revenue(v, ReserveVector{{rho}}); }) ==
        doctest::Approx(closed).epsilon(1e-12));

  const auto point = FiniteDistribution::uniform({ValuationProfile::dense({{1, 0}, {0, 2}})});
  CHECK(expected_utility(point, [](const ValuationProfile& v) { return v.value(1, 1); }) == 2.0);
  FiniteDistribution two{{ValuationProfile::dense({{0}, {0}}), ValuationProfile::dense({{1}, {0}})}, {0.5, 0.5}};
  CHECK(expected_utility(two, [](const ValuationProfile& v) { return v.value(0, 0); }) == 0.5);
  FiniteDistribution bad{{ValuationProfile::dense({{0}, {0}})}, {0.7}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("nam distribution") {
  const auto g = synthetic_nam_groups(870, 1677, 3);
  CHECK(g.a1.size() == 870);
  CHECK(g.a2.size() == 1677);
  const auto d = build_nam_distribution(g, 500, 9);
  CHECK(d.support.size() == 500);
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    const auto& v = d.support[i];
    CHECK(v.n_agents() == 1000);
    std::set<int> agents;
    for (const auto& e : v.entries()) agents.insert(e.agent);
    CHECK(agents == std::set<int>{static_cast<int>(i), static_cast<int>(500 + i)});
    CHECK(v.value(static_cast<int>(i), 0) >= 0.35);
  }
  CHECK_THROWS_AS(build_nam_distribution(NamGroups{}, 5, 1), std::invalid_argument);
  // Same seed, same support.
  CHECK(to_json(build_nam_distribution(g, 20, 4)) == to_json(build_nam_distribution(g, 20, 4)));
}

TEST_CASE("jester ingestion") {
  std::istringstream with_count("3,10,-10,99,0\n4,1,2,3,4\n");
  const auto t = ingest_jester(with_count, Normalization::to_unit);
  CHECK(t.n_jokes == 4);
  CHECK(t.rows[0][0] == 1.0);
  CHECK(t.rows[0][1] == 0.0);
  CHECK(std::isnan(t.rows[0][2]));
  CHECK(t.joke(2) == std::vector<double>{0.65});

  std::istringstream plain("j1,j2\n10,-10\n99,5\n");
  const auto c = ingest_jester(plain, Normalization::to_centered);
  CHECK(c.n_jokes == 2);
  CHECK(c.rows[0] == std::vector<double>{0.5, -0.5});
  CHECK(c.joke(0).size() == 1);

  std::istringstream bad("1,2\n3,12\n");
  CHECK_THROWS_WITH_AS(ingest_jester(bad, Normalization::to_unit), "ratings: value out of [-10, 10] at row 2, column 2",
                       std::invalid_argument);

  RatingsTable tiny{{{0.3, 0.9}, {0.8, 0.4}}, 2};
  CHECK(select_spa_joke(tiny, 1) == 0);
  CHECK_THROWS_AS(select_spa_joke(tiny, 2), std::invalid_argument);

  RatingsTable centered{{{0.4, -0.1}, {-0.2, 0.1}, {0.1, 0.1}}, 2};
  const auto g = nam_groups(centered, 0, 1);
  CHECK(g.a1.size() == 1);
  CHECK(g.a2.size() == 1);
}
