#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "algotune/piecewise.hpp"
#include "json.hpp"

namespace algotune {

// Bases encoded A=0, U=1, C=2, G=3.
struct RnaSequence {
  std::vector<int> bases;

  std::size_t size() const { return bases.size(); }
};

RnaSequence parse_rna(const std::string& letters);
std::string to_string(const RnaSequence& s);

// 1-based index pairs (i, j) with i + 2 <= j, sorted.
struct Folding {
  std::vector<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool operator==(const Folding&) const = default;
};

// Sorts the pairs and checks separation, disjointness, non-crossing and,
// when n > 0, the index range.
Folding make_folding(std::vector<std::pair<int, int>> pairs, int n = 0);

class StackScores {
 public:
  StackScores() { table_.fill(0.0); }

  // +1 when both (b1,b2) and (b3,b4) are Watson-Crick pairs.
  static StackScores watson_crick();

  double operator()(int b1, int b2, int b3, int b4) const { return table_[index(b1, b2, b3, b4)]; }
  void set(int b1, int b2, int b3, int b4, double v);

 private:
  static std::size_t index(int b1, int b2, int b3, int b4) {
    return static_cast<std::size_t>(((b1 * 4 + b2) * 4 + b3) * 4 + b4);
  }
  std::array<double, 256> table_{};
};

StackScores read_stack_scores(std::istream& in);

// Sum of M[S_i, S_j, S_{i-1}, S_{j+1}] over pairs stacked directly inside another.
double stacking_score(const RnaSequence& s, const Folding& f, const StackScores& m);
double fold_objective(const RnaSequence& s, const Folding& f, double rho, const StackScores& m);

struct FoldResult {
  Folding folding;
  double objective = 0.0;
};

FoldResult fold(const RnaSequence& s, double rho, const StackScores& m);

struct SizeStack {
  int k;
  double stack;
};

std::vector<SizeStack> max_stack_by_size(const RnaSequence& s, const StackScores& m);

PiecewiseFunction1D rho_breakpoints(const RnaSequence& s, const StackScores& m);

double pair_utility(const Folding& candidate, const Folding& truth);

PiecewiseFunction1D rna_utility_breakpoints(const RnaSequence& s, const StackScores& m, const Folding& truth);

nlohmann::json to_json(const Folding& f);
Folding folding_from_json(const nlohmann::json& j, int n = 0);

}  // namespace algotune
