#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "algotune/piecewise.hpp"

namespace algotune {

class ClusterInstance {
 public:
  explicit ClusterInstance(std::vector<std::vector<double>> dist);
  static ClusterInstance euclidean(const std::vector<std::vector<double>>& points);

  int n() const { return n_; }
  double d(int a, int b) const {
    return d_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b)];
  }

 private:
  int n_;
  std::vector<double> d_;
};

// Reads a distance matrix (CSV rows), or points one per row when
// `points` is set, using the Euclidean metric.
ClusterInstance read_cluster_instance(std::istream& in, bool points);

enum class MergeFamily { C1, C2, C3 };

// Merge value of clusters A and B. rho may be +/-infinity for C1 and C3.
double merge_value(MergeFamily family, double rho, const std::vector<int>& a, const std::vector<int>& b,
                   const ClusterInstance& inst);

struct Merge {
  int left;   // node ids: leaves 0..n-1, merge t creates node n + t
  int right;  // left holds the smaller minimum point id
  bool operator==(const Merge&) const = default;
};

struct ClusterTree {
  int n = 0;
  std::vector<Merge> merges;
  std::vector<std::vector<int>> members;  // per node, sorted point ids

  int root() const { return 2 * n - 2; }
  bool operator==(const ClusterTree& o) const { return n == o.n && merges == o.merges; }
};

ClusterTree agglomerate(const ClusterInstance& inst, MergeFamily family, double rho);

struct Clustering {
  std::vector<std::vector<int>> clusters;  // sorted, ordered by smallest id
  double cost = 0.0;
};

// Best k-pruning of the tree under the k-median objective (centers drawn
// from the cluster's own points).
Clustering prune_tree(const ClusterTree& tree, int k, const ClusterInstance& inst);

double kmedian_cost(const std::vector<int>& cluster, const ClusterInstance& inst);

using TreeUtility = std::function<double(const ClusterTree&)>;

// Fraction of point pairs on which the best k-pruning and the labels agree
// about being together.
TreeUtility pair_agreement_utility(const ClusterInstance& inst, std::vector<int> labels, int k);

struct C2Decomposition {
  PiecewiseFunction1D partition;  // piece tag i indexes trees
  std::vector<ClusterTree> trees;
};

C2Decomposition c2_decomposition(const ClusterInstance& inst, const TreeUtility& utility);
PiecewiseFunction1D c2_breakpoints(const ClusterInstance& inst, const TreeUtility& utility);

}  // namespace algotune
