#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

namespace algotune {

// Largest N with N ln 2 <= vc (1 + ln k + ln N) + pdim (1 + ln N).
long long pdim_from_counting(long long vc_dual, long long pdim_dual, long long k);

// Largest N with 2^N <= B N + 1.
long long pdim_from_oscillations(long long B);

// 4a ln(2a) + 2b, valid for a >= 1, b > 0.
double log_inequality_bound(double a, double b);

// constant * H * sqrt((pdim + ln(1/delta)) / N); the constant is not calibrated.
double generalization_bound(double H, double pdim, long long N, double delta, double constant = 1.0);

// sqrt((4/N) ln(eN)) + sqrt(ln(1/delta) / (2N)).
double spa_estimation_bound(long long N, double delta);

// sqrt(ln(2n/delta) / (2N)).
double finite_class_bound(long long n, long long N, double delta);

struct ExpTerm {
  double a;
  double b;
};

struct ExpRoots {
  std::vector<double> roots;
  bool hit_cap = false;
};

// Roots in [lo, hi] of h(x) = sum_i a_i b_i^{-x}. At most t roots are
// returned, t being the number of distinct bases with nonzero coefficient.
ExpRoots exp_sum_roots_checked(std::span<const ExpTerm> terms, double lo, double hi, double tol);
std::vector<double> exp_sum_roots(std::span<const ExpTerm> terms, double lo, double hi,
                                  double tol);

using Evaluator = std::function<double(std::span<const double>)>;

struct ShatteringCertificate {
  int n = 0;
  std::vector<double> witnesses;
  bool shattered = false;
  std::vector<std::uint32_t> patterns_found;  // sorted, bit i = 1{f_i >= z_i}

  std::size_t pattern_count() const { return patterns_found.size(); }
};

ShatteringCertificate verify_shattering(std::span<const Evaluator> fns,
                                        std::span<const double> witnesses,
                                        std::span<const std::vector<double>> candidates);

nlohmann::json to_json(const ShatteringCertificate& c);

}  // namespace algotune
