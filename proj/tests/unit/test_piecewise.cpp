#include <algorithm>
#include <cmath>
#include <random>

#include "algotune/piecewise.hpp"
#include "doctest.h"

using namespace algotune;

namespace {

double brute_max(const std::vector<Line1D>& lines, double x) {
  double m = -kInf;
  for (const auto& l : lines) m = std::max(m, l.slope * x + l.intercept);
  return m;
}

// Counts indicator flips on a fine grid; exact for the generic inputs below.
int sampled_flips(const PiecewiseFunction1D& f, double z, int samples) {
  int flips = 0;
  bool prev = f(f.lo()) >= z;
  for (int s = 1; s <= samples; ++s) {
    const double x = f.lo() + (f.hi() - f.lo()) * s / samples;
    const bool cur = f(x) >= z;
    flips += cur != prev;
    prev = cur;
  }
  return flips;
}

}  // namespace

TEST_CASE("upper envelope basic cases") {
  std::vector<Line1D> one{{0, 1, 0}};
  auto f = upper_envelope(one, 0, 1);
  CHECK(f.size() == 1);
  CHECK(f.pieces()[0] == Piece{0, 1, 0});

  std::vector<Line1D> two{{1, 0, 0}, {-1, 1, 1}};
  auto g = upper_envelope(two, 0, 1);
  REQUIRE(g.breakpoints().size() == 1);
  CHECK(g.breakpoints()[0] == doctest::Approx(0.5));
  CHECK(g.pieces()[0].tag == 1);
  CHECK(g.pieces()[1].tag == 0);

  std::vector<Line1D> three{{1, 0, 0}, {-1, 1, 1}, {0, 0.4, 2}};
  CHECK(upper_envelope(three, 0, 1) == g);

  CHECK_THROWS_WITH(upper_envelope(std::vector<Line1D>{}, 0, 1), "upper_envelope: no candidates");
}

TEST_CASE("upper envelope ties") {
  // Identical lines: the lowest tag wins.
  std::vector<Line1D> same{{1, 0, 5}, {1, 0, 3}};
  CHECK(upper_envelope(same, 0, 1).pieces()[0].tag == 3);
  // Isolated tie at the left end goes to the line that wins to the right.
  std::vector<Line1D> at_lo{{-1, 0, 0}, {1, 0, 1}};
  auto f = upper_envelope(at_lo, 0, 1);
  CHECK(f.size() == 1);
  CHECK(f.pieces()[0].tag == 1);
  // Three lines through one point.
  std::vector<Line1D> fan{{-1, 0, 0}, {0, 0, 1}, {1, 0, 2}};
  auto h = upper_envelope(fan, -1, 1);
  REQUIRE(h.size() == 2);
  CHECK(h.breakpoints()[0] == doctest::Approx(0.0));
  CHECK(h.pieces()[1].tag == 2);
}

TEST_CASE("upper envelope on unbounded domains") {
  std::vector<Line1D> lines{{1, 0, 0}, {-1, 0, 1}, {0, 0.5, 2}};
  auto f = upper_envelope(lines, -kInf, kInf);
  REQUIRE(f.size() == 3);
  CHECK(f.pieces()[0].tag == 1);
  CHECK(f.pieces()[1].tag == 2);
  CHECK(f.pieces()[2].tag == 0);
  CHECK(f(-10) == doctest::Approx(10));
  CHECK(f(10) == doctest::Approx(10));
}

TEST_CASE("upper envelope matches brute force on random line sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-5, 5);
  std::uniform_int_distribution<int> count(1, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Line1D> lines(static_cast<std::size_t>(count(rng)));
    for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = {coef(rng), coef(rng), static_cast<std::int64_t>(i)};
    const auto f = upper_envelope(lines, -2, 3);
    for (std::size_t i = 1; i < f.pieces().size(); ++i) CHECK(!(f.pieces()[i] == f.pieces()[i - 1]));
    for (int s = 0; s < 100; ++s) {
      const double x = std::uniform_real_distribution<double>(-2, 3)(rng);
      const double want = brute_max(lines, x);
      REQUIRE(f(x) == doctest::Approx(want).epsilon(1e-9));
      const auto tag = f.pieces()[f.piece_index(x)].tag;
      CHECK(lines[static_cast<std::size_t>(tag)].at(x) == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("average") {
  auto a = PiecewiseFunction1D::constant(0, 1, 0.5);
  auto b = PiecewiseFunction1D::constant(0, 1, 0.7);
  std::vector<PiecewiseFunction1D> ab{a, b};
  auto m = average(ab);
  CHECK(m.size() == 1);
  CHECK(m(0.3) == doctest::Approx(0.6));

  PiecewiseFunction1D s1(0, 1, {0.5}, {{0, 1, 0}, {0, 0, 0}});
  PiecewiseFunction1D s2(0, 1, {0.5}, {{0, 0, 0}, {0, 1, 0}});
  std::vector<PiecewiseFunction1D> sym{s1, s2};
  auto c = average(sym);
  CHECK(c.size() == 1);
  CHECK(c(0.9) == doctest::Approx(0.5));

  std::vector<PiecewiseFunction1D> self{s1, s1};
  CHECK(average(self) == s1);

  std::vector<PiecewiseFunction1D> bad{a, PiecewiseFunction1D::constant(0, 2, 1)};
  CHECK_THROWS_AS(average(bad), std::invalid_argument);
}

TEST_CASE("average is pointwise linear on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Line1D> l1(5), l2(4);
    for (auto& l : l1) l = {coef(rng), coef(rng), 0};
    for (auto& l : l2) l = {coef(rng), coef(rng), 0};
    auto f = upper_envelope(l1, 0, 1);
    auto g = upper_envelope(l2, 0, 1);
    std::vector<PiecewiseFunction1D> fg{f, g};
    auto avg = average(fg);
    for (int s = 0; s <= 50; ++s) {
      const double x = s / 50.0;
      CHECK(avg(x) == doctest::Approx((f(x) + g(x)) / 2).epsilon(1e-12));
    }
  }
}

TEST_CASE("argmax") {
  auto c = argmax(PiecewiseFunction1D::constant(0, 1, 0.6));
  CHECK(c.param == 0);
  CHECK(c.value == doctest::Approx(0.6));
  auto r = argmax(PiecewiseFunction1D(0, 1, {}, {{1, 0, 0}}));
  CHECK(r.param == 1);
  CHECK(r.value == 1);
  CHECK_FALSE(r.attained_in_limit);
  auto s = argmax(PiecewiseFunction1D(0, 1, {0.3}, {{0, 0, 0}, {0, 1, 0}}));
  CHECK(s.param == doctest::Approx(0.3));
  CHECK(s.value == 1);
  // Supremum approached only from the left of a breakpoint.
  auto l = argmax(PiecewiseFunction1D(0, 1, {0.5}, {{1, 0, 0}, {0, 0, 0}}));
  CHECK(l.param == doctest::Approx(0.5));
  CHECK(l.value == doctest::Approx(0.5));
  CHECK(l.attained_in_limit);
  CHECK_THROWS_WITH(argmax(PiecewiseFunction1D(0, kInf, {}, {{1, 0, 0}})), "argmax: unbounded");
  auto u = argmax(PiecewiseFunction1D(0, kInf, {2}, {{1, 0, 0}, {-1, 4, 0}}));
  CHECK(u.param == doctest::Approx(2));
  CHECK(u.value == doctest::Approx(2));
}

TEST_CASE("count oscillations") {
  CHECK(count_oscillations(PiecewiseFunction1D::constant(0, 1, 0.5), 0.7) == 0);
  CHECK(count_oscillations(PiecewiseFunction1D(0, 1, {}, {{1, 0, 0}}), 0.5) == 1);
  // Second-price auction dual with v1 = 0.8, v2 = 0.5.
  PiecewiseFunction1D spa(0, 1, {0.5, 0.8}, {{0, 0.5, 0}, {1, 0, 0}, {0, 0, 0}});
  for (double z = 0.01; z <= 0.8; z += 0.01) CHECK(count_oscillations(spa, z) <= 2);
  CHECK(count_oscillations(spa, 0.6) == 2);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> bps;
    for (int i = 0; i < 6; ++i) bps.push_back(u(rng));
    std::sort(bps.begin(), bps.end());
    std::vector<Piece> ps;
    for (int i = 0; i < 7; ++i) ps.push_back({0, u(rng), 0});
    PiecewiseFunction1D f(0, 1, bps, ps);
    const double z = u(rng);
    const int k = count_oscillations(f, z);
    CHECK(k <= static_cast<int>(f.breakpoints().size()));
    CHECK(k == sampled_flips(f, z, 20000));
  }
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Line1D> lines(4);
    for (auto& l : lines) l = {u(rng) * 4 - 2, u(rng), 0};
    auto f = upper_envelope(lines, 0, 1);
    const double z = u(rng);
    CHECK(count_oscillations(f, z) == sampled_flips(f, z, 20000));
  }
}

TEST_CASE("canonical form and json round trip") {
  PiecewiseFunction1D f(0, 1, {0.2, 0.4, 0.4 + 1e-12}, {{0, 1, 0}, {0, 1, 0}, {0, 2, 0}, {0, 3, 1}});
  CHECK(f.breakpoints().size() == 1);
  CHECK(f.pieces().back() == Piece{0, 3, 1});
  auto g = piecewise_from_json(to_json(f));
  CHECK(g == f);
  PiecewiseFunction1D inf(-kInf, kInf, {0}, {{1, 0, 0}, {-1, 0, 2}});
  auto j = to_json(inf);
  CHECK(j["lo"] == "-inf");
  CHECK(piecewise_from_json(j) == inf);
  CHECK_THROWS_AS(PiecewiseFunction1D(0, 1, {0.5, 0.2}, {{}, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseFunction1D(0, 1, {1.5}, {{}, {}}), std::invalid_argument);
}
