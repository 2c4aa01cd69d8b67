#include <cmath>
#include <random>

#include "algotune/bounds.hpp"
#include "doctest.h"

using namespace algotune;

namespace {

// Scans every N up to a cap and keeps the largest that satisfies the
// defining inequality, without assuming a single crossover.
long long brute_counting(long long vc, long long pd, long long k) {
  long long best = 0;
  for (long long n = 1; n <= 5000; ++n) {
    const double lhs = std::pow(2.0, static_cast<double>(std::min<long long>(n, 1000)));
    const double rhs = std::pow(std::exp(1.0) * k * n, static_cast<double>(vc)) *
                       std::pow(std::exp(1.0) * n, static_cast<double>(pd));
    if (n < 1000 && lhs <= rhs * (1 + 1e-12)) best = n;
  }
  return best;
}

long long brute_oscillations(long long B) {
  long long best = 0;
  for (long long n = 1; n < 62; ++n)
    if ((1LL << n) <= B * n + 1) best = n;
  return best;
}

}  // namespace

TEST_CASE("pdim from counting") {
  CHECK(pdim_from_counting(1, 0, 1) == 3);
  CHECK(pdim_from_counting(0, 1, 1) == 3);
  CHECK(pdim_from_counting(0, 0, 5) == 0);
  CHECK(pdim_from_counting(2, 1, 10) >= pdim_from_counting(1, 1, 10));
  for (long long vc = 0; vc <= 8; ++vc)
    for (long long pd = 0; pd <= 8; ++pd)
      for (long long k : {1LL, 2LL, 7LL, 50LL}) {
        if (vc == 0 && pd == 0) continue;
        CHECK(pdim_from_counting(vc, pd, k) == brute_counting(vc, pd, k));
      }
}

TEST_CASE("pdim from oscillations") {
  CHECK(pdim_from_oscillations(1) == 1);
  CHECK(pdim_from_oscillations(2) == 2);
  CHECK(pdim_from_oscillations(100) == 9);
  for (long long B : {1LL, 3LL, 17LL, 1000LL, 123456LL, 1000000LL})
    CHECK(pdim_from_oscillations(B) == brute_oscillations(B));
  CHECK_THROWS(pdim_from_oscillations(0));
}

TEST_CASE("closed-form bounds") {
  CHECK(log_inequality_bound(1, 1) == doctest::Approx(4 * std::log(2.0) + 2));
  CHECK(log_inequality_bound(2, 0.5) == doctest::Approx(12.090).epsilon(1e-4));
  CHECK_THROWS(log_inequality_bound(0.5, 1));
  CHECK_THROWS(log_inequality_bound(1, 0));

  const double e_inv = std::exp(-1.0);
  CHECK(generalization_bound(1, 4, 400, e_inv) == doctest::Approx(std::sqrt(5.0 / 400)));
  CHECK(generalization_bound(1, 4, 1600, e_inv) == doctest::Approx(generalization_bound(1, 4, 400, e_inv) / 2));
  CHECK(generalization_bound(3, 0, 1, e_inv) == doctest::Approx(3));

  CHECK(spa_estimation_bound(1, 0.01) == doctest::Approx(3.5174).epsilon(1e-4));
  CHECK(spa_estimation_bound(10000, 0.01) == doctest::Approx(0.0806).epsilon(2e-3));
  for (long long n = 1; n < 2000; ++n) CHECK(spa_estimation_bound(n + 1, 0.01) < spa_estimation_bound(n, 0.01));

  CHECK(finite_class_bound(1000, 100, 0.01) == doctest::Approx(0.2470).epsilon(1e-3));
  CHECK(finite_class_bound(1000, 100, 0.01) == doctest::Approx(std::sqrt(std::log(200.0 * 1000) / 200)));
  CHECK(finite_class_bound(1, 50, 0.05) == doctest::Approx(std::sqrt(std::log(2 / 0.05) / 100)));
  CHECK(finite_class_bound(10, 50, 0.05) > finite_class_bound(5, 50, 0.05));
}

TEST_CASE("exponential sum roots") {
  std::vector<ExpTerm> t1{{1, 2}, {-1, 4}};
  auto r1 = exp_sum_roots(t1, -5, 5, 1e-10);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0] == doctest::Approx(0).epsilon(1e-8));

  std::vector<ExpTerm> t2{{3, 2}};
  CHECK(exp_sum_roots(t2, -5, 5, 1e-10).empty());

  std::vector<ExpTerm> t3{{2, 2}, {-1, 1}};
  auto r3 = exp_sum_roots(t3, -5, 5, 1e-10);
  REQUIRE(r3.size() == 1);
  CHECK(r3[0] == doctest::Approx(1).epsilon(1e-8));

  std::vector<ExpTerm> zero{{0, 2}, {0, 3}};
  CHECK(exp_sum_roots(zero, 0, 1, 1e-9).empty());

  // Random sums never exceed the term count, and every root is a sign change.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> a(-2, 2), b(0.2, 5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ExpTerm> terms(4);
    for (auto& t : terms) t = {a(rng), b(rng)};
    auto roots = exp_sum_roots(terms, -3, 3, 1e-10);
    CHECK(roots.size() <= terms.size());
    for (double x : roots) {
      auto h = [&](double y) {
        double s = 0;
        for (auto& t : terms) s += t.a * std::pow(t.b, -y);
        return s;
      };
      const double lo = std::max(-3.0, x - 1e-7), hi = std::min(3.0, x + 1e-7);
      CHECK((h(lo) * h(hi) <= 0 || std::fabs(h(x)) < 1e-8));
    }
  }
}

TEST_CASE("verify shattering") {
  std::vector<Evaluator> f{[](std::span<const double> r) { return r[0]; }};
  std::vector<double> z{0.5};
  std::vector<std::vector<double>> cands{{0.0}, {1.0}};
  auto c = verify_shattering(f, z, cands);
  CHECK(c.shattered);
  CHECK(c.pattern_count() == 2);
  auto j = to_json(c);
  CHECK(j["patterns_found"] == 2);
  CHECK(j["shattered"] == true);

  std::vector<std::vector<double>> same{{0.3}, {0.3}};
  CHECK_FALSE(verify_shattering(f, z, same).shattered);

  std::vector<Evaluator> many(25, f.front());
  std::vector<double> zz(25, 0.5);
  CHECK_THROWS_WITH(verify_shattering(many, zz, cands), "instance set too large to verify");
}
