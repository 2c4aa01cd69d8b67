#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "algotune/piecewise.hpp"
#include "json.hpp"

namespace algotune {

class ContactMatrix {
 public:
  explicit ContactMatrix(std::vector<std::vector<double>> rows);

  int n() const { return n_; }
  // 1-based access.
  double operator()(int p, int q) const {
    return data_[static_cast<std::size_t>(p - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(q - 1)];
  }

 private:
  int n_;
  std::vector<double> data_;
};

ContactMatrix read_contact_matrix(std::istream& in);

// c_ij for 1 <= i < j <= n.
class TadWeights {
 public:
  explicit TadWeights(int n) : n_(n), c_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0) {}

  int n() const { return n_; }
  double operator()(int i, int j) const { return c_[idx(i, j)]; }
  void set(int i, int j, double v) { c_[idx(i, j)] = v; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j);
  }
  int n_;
  std::vector<double> c_;
};

TadWeights precompute_cij(const ContactMatrix& m);

struct TadSet {
  std::vector<std::pair<int, int>> intervals;

  std::size_t size() const { return intervals.size(); }
  bool operator==(const TadSet&) const = default;
};

// Validates the ordering i1 < j1 < i2 < j2 < ...
TadSet make_tad_set(std::vector<std::pair<int, int>> intervals);

double tad_objective(const TadWeights& w, const TadSet& t, double rho);

struct TadResult {
  TadSet tads;
  double objective = 0.0;
};

TadResult tad_optimize(const TadWeights& w, double rho, int min_length = 1);

struct TadDecomposition {
  // Piece i: slope 0, intercept = objective at the piece's probe point, tag i.
  PiecewiseFunction1D partition;
  std::vector<TadSet> sets;
  bool root_cap_hit = false;

  double objective_at(const TadWeights& w, double rho) const;
};

TadDecomposition rho_decomposition(const TadWeights& w, double rho_hi, double tol, int min_length = 1);

double tad_utility(const TadSet& candidate, const TadSet& truth);

// Piecewise-constant tad_utility of the optimal set over [0, rho_hi].
PiecewiseFunction1D tad_utility_breakpoints(const TadDecomposition& d, const TadSet& truth);

nlohmann::json to_json(const TadSet& t);
TadSet tad_set_from_json(const nlohmann::json& j);

}  // namespace algotune
