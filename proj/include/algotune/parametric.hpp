#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace algotune {

template <class Solution>
struct Segment {
  double start;
  Solution solution;
};

struct ParametricOptions {
  // Intervals narrower than this are not split further.
  double tol = 1e-12;
  // Probe the midpoint of intervals whose endpoint solutions agree. Needed
  // when the optimal solution is not guaranteed constant between two points
  // where it coincides.
  bool verify_midpoint = false;
  std::size_t max_solves = 2'000'000;
};

// Partitions [lo, hi] into maximal intervals on which solve(rho) returns the
// same solution. crossing(a, b, lo, hi) returns a point in [lo, hi] where a
// and b tie, or nullopt when unknown (the midpoint is used instead).
template <class Solution, class Solve, class Crossing>
std::vector<Segment<Solution>> parametric_partition(double lo, double hi, Solve&& solve,
                                                    Crossing&& crossing,
                                                    ParametricOptions opt = {}) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("parametric_partition: invalid interval");
  std::vector<Segment<Solution>> out;
  std::size_t solves = 0;

  auto eval = [&](double x) {
    if (++solves > opt.max_solves)
      throw std::runtime_error("parametric_partition: solve budget exhausted");
    return solve(x);
  };
  auto emit = [&](double start, const Solution& s) {
    if (!out.empty() && out.back().solution == s) return;
    if (!out.empty() && start <= out.back().start) {
      out.back().solution = s;
      if (out.size() >= 2 && out[out.size() - 2].solution == s) out.pop_back();
      return;
    }
    out.push_back({start, s});
  };

  auto rec = [&](auto&& self, double a, double b, const Solution& sa, const Solution& sb) -> void {
    const double mid = a + (b - a) / 2.0;
    if (sa == sb) {
      if (opt.verify_midpoint && b - a > 2.0 * opt.tol) {
        Solution sm = eval(mid);
        if (!(sm == sa)) {
          self(self, a, mid, sa, sm);
          self(self, mid, b, sm, sb);
          return;
        }
      }
      emit(a, sa);
      return;
    }
    std::optional<double> cx = crossing(sa, sb, a, b);
    double x = cx && std::isfinite(*cx) ? *cx : mid;
    if (b - a <= opt.tol) {
      x = std::clamp(x, a, b);
      emit(a, sa);
      emit(x, sb);
      return;
    }
    x = std::clamp(x, a + opt.tol / 2.0, b - opt.tol / 2.0);
    Solution sx = eval(x);
    self(self, a, x, sa, sx);
    self(self, x, b, sx, sb);
  };

  Solution slo = eval(lo);
  Solution shi = eval(hi);
  rec(rec, lo, hi, slo, shi);
  return out;
}

}  // namespace algotune
