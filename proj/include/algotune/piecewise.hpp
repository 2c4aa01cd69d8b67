#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace algotune {

// Global comparison tolerance for breakpoints and tie detection.
inline constexpr double kCmpEps = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Line1D {
  double slope = 0.0;
  double intercept = 0.0;
  std::int64_t tag = 0;

  double at(double x) const { return slope * x + intercept; }
};

struct Piece {
  double slope = 0.0;
  double intercept = 0.0;
  std::int64_t tag = 0;

  double at(double x) const { return slope == 0.0 ? intercept : slope * x + intercept; }
  bool operator==(const Piece&) const = default;
};

// Piecewise-linear function of one real parameter on [lo, hi].
//
// Piece i governs the half-open interval [t_i, t_{i+1}) where t_0 = lo and
// t_{k} = hi; the last piece is closed at a finite hi. Either end may be
// infinite. Adjacent identical pieces are merged on construction, so two
// functions with the same values and tags compare equal structurally.
class PiecewiseFunction1D {
 public:
  PiecewiseFunction1D(double lo, double hi, std::vector<double> breakpoints,
                      std::vector<Piece> pieces);

  static PiecewiseFunction1D constant(double lo, double hi, double value,
                                      std::int64_t tag = 0);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool bounded() const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }

  // Start and end of piece i (end is exclusive except for the last piece).
  double piece_start(std::size_t i) const;
  double piece_end(std::size_t i) const;

  // A finite point strictly inside piece i, used to probe algorithms.
  double piece_probe(std::size_t i) const;

  std::size_t piece_index(double x) const;
  double operator()(double x) const;

  bool operator==(const PiecewiseFunction1D&) const = default;

 private:
  double lo_;
  double hi_;
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
};

PiecewiseFunction1D upper_envelope(std::span<const Line1D> lines, double lo, double hi);

// Pointwise mean of functions sharing one domain. Tags are cleared.
PiecewiseFunction1D average(std::span<const PiecewiseFunction1D> fns);

struct ArgmaxResult {
  double param = 0.0;
  double value = 0.0;
  bool attained_in_limit = false;
};

ArgmaxResult argmax(const PiecewiseFunction1D& fn);

// Number of discontinuities of x -> 1{fn(x) >= z} over the domain.
int count_oscillations(const PiecewiseFunction1D& fn, double z);

// Merges adjacent pieces whose slopes and intercepts agree within tol,
// ignoring tags (the merged piece keeps the left tag).
PiecewiseFunction1D merge_equal_values(const PiecewiseFunction1D& fn, double tol = 1e-12);

nlohmann::json to_json(const PiecewiseFunction1D& fn);
PiecewiseFunction1D piecewise_from_json(const nlohmann::json& j);

}  // namespace algotune
