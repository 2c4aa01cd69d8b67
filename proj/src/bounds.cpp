#include "algotune/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace algotune {

long long pdim_from_counting(long long vc_dual, long long pdim_dual, long long k) {
  if (vc_dual < 0 || pdim_dual < 0) throw std::invalid_argument("pdim_from_counting: negative dimension");
  if (k < 1) throw std::invalid_argument("pdim_from_counting: k must be >= 1");
  if (vc_dual == 0 && pdim_dual == 0) return 0;
  const double vc = static_cast<double>(vc_dual);
  const double pd = static_cast<double>(pdim_dual);
  const double lk = std::log(static_cast<double>(k));
  auto holds = [&](long long n) {
    const double ln = std::log(static_cast<double>(n));
    return static_cast<double>(n) * std::log(2.0) <= vc * (1.0 + lk + ln) + pd * (1.0 + ln);
  };
  long long n = 1;
  while (holds(n + 1)) ++n;
  return n;
}

long long pdim_from_oscillations(long long B) {
  if (B < 1) throw std::invalid_argument("pdim_from_oscillations: B must be >= 1");
  auto holds = [&](long long n) {
    return static_cast<long double>(n) * std::log(2.0L) <=
           std::log(static_cast<long double>(B) * n + 1.0L);
  };
  long long n = 1;
  while (holds(n + 1)) ++n;
  return n;
}

double log_inequality_bound(double a, double b) {
  if (!(a >= 1.0) || !(b > 0.0)) throw std::invalid_argument("log_inequality_bound: need a >= 1, b > 0");
  return 4.0 * a * std::log(2.0 * a) + 2.0 * b;
}

double generalization_bound(double H, double pdim, long long N, double delta, double constant) {
  if (N < 1 || !(delta > 0.0 && delta < 1.0) || pdim < 0 || !(H > 0))
    throw std::invalid_argument("generalization_bound: invalid arguments");
  return constant * H * std::sqrt((pdim + std::log(1.0 / delta)) / static_cast<double>(N));
}

double spa_estimation_bound(long long N, double delta) {
  if (N < 1 || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("spa_estimation_bound: need N >= 1 and delta in (0,1)");
  const double n = static_cast<double>(N);
  return std::sqrt(4.0 / n * std::log(std::exp(1.0) * n)) + std::sqrt(std::log(1.0 / delta) / (2.0 * n));
}

double finite_class_bound(long long n, long long N, double delta) {
  if (n < 1 || N < 1 || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("finite_class_bound: invalid arguments");
  return std::sqrt(std::log(2.0 * static_cast<double>(n) / delta) / (2.0 * static_cast<double>(N)));
}

namespace {

struct ExpSum {
  std::vector<double> a;
  std::vector<double> lnb;

  // Sign-preserving value scaled by exp(-max exponent).
  double scaled(double x) const {
    double m = -INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::log(std::fabs(a[i])) - x * lnb[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      s += std::copysign(std::exp(std::log(std::fabs(a[i])) - x * lnb[i] - m), a[i]);
    return s;
  }
  double derivative_scaled(double x) const {
    double m = -INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (lnb[i] != 0.0) m = std::max(m, std::log(std::fabs(a[i] * lnb[i])) - x * lnb[i]);
    if (std::isinf(m)) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (lnb[i] == 0.0) continue;
      const double c = -a[i] * lnb[i];
      s += std::copysign(std::exp(std::log(std::fabs(c)) - x * lnb[i] - m), c);
    }
    return s;
  }
};

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

ExpRoots exp_sum_roots_checked(std::span<const ExpTerm> terms, double lo, double hi, double tol) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi) || !(tol > 0))
    throw std::invalid_argument("exp_sum_roots: invalid interval or tolerance");
  std::map<double, double> combined;
  for (const auto& t : terms) {
    if (!(t.b > 0.0)) throw std::invalid_argument("exp_sum_roots: bases must be positive");
    combined[t.b] += t.a;
  }
  ExpSum h;
  for (const auto& [b, a] : combined) {
    if (a == 0.0) continue;
    h.a.push_back(a);
    h.lnb.push_back(std::log(b));
  }
  ExpRoots result;
  const std::size_t t = h.a.size();
  if (t == 0) return result;
  if (lo == hi) {
    if (h.scaled(lo) == 0.0) result.roots.push_back(lo);
    return result;
  }

  std::vector<double> roots;
  auto bisect = [&](double a, double b, int sa) {
    while (b - a > tol) {
      const double m = a + (b - a) / 2.0;
      const int sm = sign_of(h.scaled(m));
      if (sm == 0) return m;
      if (sm == sa) a = m;
      else b = m;
    }
    return a + (b - a) / 2.0;
  };
  // Scans [a, b] for sign changes, refining cells where h' changes sign so
  // that a close pair of roots is not missed.
  auto scan = [&](auto&& self, double a, double b, int depth) -> void {
    const double fa = h.scaled(a);
    const double fb = h.scaled(b);
    const int sa = sign_of(fa);
    const int sb = sign_of(fb);
    if (sa == 0) {
      if (roots.empty() || a - roots.back() > tol) roots.push_back(a);
      return;
    }
    if (sb != 0 && sa != sb) {
      roots.push_back(bisect(a, b, sa));
      return;
    }
    if (depth <= 0 || b - a <= tol) return;
    if (sign_of(h.derivative_scaled(a)) == sign_of(h.derivative_scaled(b))) return;
    const double m = a + (b - a) / 2.0;
    self(self, a, m, depth - 1);
    self(self, m, b, depth - 1);
  };

  const double step = (hi - lo) / (64.0 * static_cast<double>(t));
  double a = lo;
  for (std::size_t cell = 0; a < hi; ++cell) {
    const double b = std::min(hi, lo + step * static_cast<double>(cell + 1));
    scan(scan, a, b, 40);
    a = b;
  }
  if (sign_of(h.scaled(hi)) == 0 && (roots.empty() || hi - roots.back() > tol)) roots.push_back(hi);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(), [&](double x, double y) { return y - x <= tol; }),
              roots.end());
  if (roots.size() > t) {
    roots.resize(t);
    result.hit_cap = true;
  }
  result.roots = std::move(roots);
  return result;
}

std::vector<double> exp_sum_roots(std::span<const ExpTerm> terms, double lo, double hi, double tol) {
  return exp_sum_roots_checked(terms, lo, hi, tol).roots;
}

ShatteringCertificate verify_shattering(std::span<const Evaluator> fns,
                                        std::span<const double> witnesses,
                                        std::span<const std::vector<double>> candidates) {
  if (fns.size() != witnesses.size())
    throw std::invalid_argument("verify_shattering: one witness per instance required");
  if (fns.size() > 24) throw std::invalid_argument("instance set too large to verify");
  if (fns.empty()) throw std::invalid_argument("verify_shattering: empty instance set");
  if (candidates.empty()) throw std::invalid_argument("verify_shattering: no candidate parameters");
  const std::size_t n = fns.size();
  std::set<std::uint32_t> found;
  for (const auto& rho : candidates) {
    std::uint32_t pattern = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (fns[i](rho) >= witnesses[i]) pattern |= (1u << i);
    found.insert(pattern);
  }
  ShatteringCertificate c;
  c.n = static_cast<int>(n);
  c.witnesses.assign(witnesses.begin(), witnesses.end());
  c.patterns_found.assign(found.begin(), found.end());
  c.shattered = found.size() == (std::size_t{1} << n);
  return c;
}

nlohmann::json to_json(const ShatteringCertificate& c) {
  return {{"n", c.n}, {"witnesses", c.witnesses}, {"shattered", c.shattered},
          {"patterns_found", c.patterns_found.size()}};
}

}  // namespace algotune
