#pragma once

#include <iosfwd>
#include <vector>

#include "algotune/piecewise.hpp"

namespace algotune {

struct KnapsackInstance {
  std::vector<double> values;
  std::vector<double> sizes;
  double capacity = 0.0;

  void validate() const;
};

struct KnapsackResult {
  std::vector<int> items;  // 0-based, ascending
  double total_value = 0.0;
};

KnapsackResult knapsack_greedy(const KnapsackInstance& inst, double rho);
PiecewiseFunction1D knapsack_breakpoints(const KnapsackInstance& inst, double rho_max);

// Rows "value,size"; an optional header row is skipped.
KnapsackInstance read_knapsack_csv(std::istream& in, double capacity);

class WeightedGraph {
 public:
  explicit WeightedGraph(std::vector<double> weights);

  int n() const { return static_cast<int>(weights_.size()); }
  double weight(int v) const { return weights_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool adjacent(int u, int v) const;
  void add_edge(int u, int v);

 private:
  std::vector<double> weights_;
  std::vector<std::vector<int>> adj_;
};

// Lines "u v" add an edge and "w v weight" set a weight (default 1); ids are
// 0-based and the vertex count is the largest id plus one, or "n count".
WeightedGraph read_graph(std::istream& in);

struct MwisResult {
  std::vector<int> vertices;  // ascending
  double total_weight = 0.0;
};

MwisResult mwis_greedy(const WeightedGraph& g, double rho);
PiecewiseFunction1D mwis_breakpoints(const WeightedGraph& g, double rho_max);

}  // namespace algotune
