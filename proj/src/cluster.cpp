#include "algotune/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "algotune/parametric.hpp"

namespace algotune {

ClusterInstance::ClusterInstance(std::vector<std::vector<double>> dist) : n_(static_cast<int>(dist.size())) {
  if (n_ < 1) throw std::invalid_argument("cluster instance: need at least one point");
  d_.reserve(dist.size() * dist.size());
  for (const auto& row : dist) {
    if (row.size() != dist.size()) throw std::invalid_argument("cluster instance: distance matrix not square");
    for (double x : row) {
      if (!std::isfinite(x) || x < 0) throw std::invalid_argument("cluster instance: distances must be finite and >= 0");
      d_.push_back(x);
    }
  }
  for (int a = 0; a < n_; ++a) {
    if (d(a, a) != 0.0) throw std::invalid_argument("cluster instance: nonzero diagonal");
    for (int b = a + 1; b < n_; ++b)
      if (std::fabs(d(a, b) - d(b, a)) > 1e-12 * std::max(1.0, d(a, b)))
        throw std::invalid_argument("cluster instance: distance matrix not symmetric");
  }
}

ClusterInstance ClusterInstance::euclidean(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    if (points[a].size() != points[0].size()) throw std::invalid_argument("cluster instance: points differ in dimension");
    for (std::size_t b = 0; b < a; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < points[a].size(); ++k) s += (points[a][k] - points[b][k]) * (points[a][k] - points[b][k]);
      d[a][b] = d[b][a] = std::sqrt(s);
    }
  }
  return ClusterInstance(std::move(d));
}

ClusterInstance read_cluster_instance(std::istream& in, bool points) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("cluster line " + std::to_string(lineno) + ": invalid number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return points ? ClusterInstance::euclidean(rows) : ClusterInstance(std::move(rows));
}

namespace {

struct Extremes {
  double mn = std::numeric_limits<double>::infinity();
  double mx = 0.0;
};

Extremes extremes(const std::vector<int>& a, const std::vector<int>& b, const ClusterInstance& inst) {
  Extremes e;
  for (int x : a)
    for (int y : b) {
      const double v = inst.d(x, y);
      e.mn = std::min(e.mn, v);
      e.mx = std::max(e.mx, v);
    }
  return e;
}

// Power mean of all cross distances, scaled by the max (rho > 0) or the min
// (rho < 0) so no intermediate overflows.
double power_mean(const std::vector<int>& a, const std::vector<int>& b, const ClusterInstance& inst, double rho,
                  const Extremes& e) {
  const double cnt = static_cast<double>(a.size() * b.size());
  if (rho == 0.0) {
    if (e.mn == 0.0) return 0.0;
    double s = 0.0;
    for (int x : a)
      for (int y : b) s += std::log(inst.d(x, y));
    return std::exp(s / cnt);
  }
  const double scale = rho > 0 ? e.mx : e.mn;
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (int x : a)
    for (int y : b) s += std::pow(inst.d(x, y) / scale, rho);
  return scale * std::pow(s / cnt, 1.0 / rho);
}

}  // namespace

double merge_value(MergeFamily family, double rho, const std::vector<int>& a, const std::vector<int>& b,
                   const ClusterInstance& inst) {
  if (a.empty() || b.empty()) throw std::invalid_argument("merge_value: clusters must be nonempty");
  for (const auto* c : {&a, &b})
    for (int x : *c)
      if (x < 0 || x >= inst.n()) throw std::invalid_argument("merge_value: point id out of range");
  if (std::isnan(rho)) throw std::invalid_argument("merge_value: rho is NaN");
  const Extremes e = extremes(a, b, inst);
  switch (family) {
    case MergeFamily::C2:
      if (!(rho >= 0 && rho <= 1)) throw std::invalid_argument("merge_value: C2 needs rho in [0, 1]");
      return rho * e.mn + (1.0 - rho) * e.mx;
    case MergeFamily::C1:
      if (rho == 0.0) throw std::invalid_argument("merge_value: C1 is undefined at rho = 0");
      if (std::isinf(rho)) return rho > 0 ? e.mx : e.mn;
      if (rho > 0) return e.mx == 0.0 ? 0.0 : e.mx * std::pow(1.0 + std::pow(e.mn / e.mx, rho), 1.0 / rho);
      return e.mn == 0.0 ? 0.0 : e.mn * std::pow(1.0 + std::pow(e.mx / e.mn, rho), 1.0 / rho);
    case MergeFamily::C3:
      if (std::isinf(rho)) return rho > 0 ? e.mx : e.mn;
      return power_mean(a, b, inst, rho, e);
  }
  throw std::invalid_argument("merge_value: unknown family");
}

namespace {

struct Live {
  int node;
  std::vector<int> members;
};

}  // namespace

ClusterTree agglomerate(const ClusterInstance& inst, MergeFamily family, double rho) {
  const int n = inst.n();
  if (n < 2) throw std::invalid_argument("agglomerate: need at least two points");
  ClusterTree t;
  t.n = n;
  t.members.reserve(static_cast<std::size_t>(2 * n - 1));
  std::vector<Live> live;
  for (int i = 0; i < n; ++i) {
    live.push_back({i, {i}});
    t.members.push_back({i});
  }
  // `live` stays ordered by smallest member, so the first strict minimum in
  // scan order is the lexicographically smallest (minA, minB) among ties.
  while (live.size() > 1) {
    std::size_t bp = 0, bq = 1;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t p = 0; p < live.size(); ++p)
      for (std::size_t q = p + 1; q < live.size(); ++q) {
        const double v = merge_value(family, rho, live[p].members, live[q].members, inst);
        if (!found || v < best) {
          best = v;
          bp = p;
          bq = q;
          found = true;
        }
      }
    const int node = n + static_cast<int>(t.merges.size());
    t.merges.push_back({live[bp].node, live[bq].node});
    std::vector<int> m;
    std::merge(live[bp].members.begin(), live[bp].members.end(), live[bq].members.begin(), live[bq].members.end(),
               std::back_inserter(m));
    t.members.push_back(m);
    live[bp] = {node, std::move(m)};
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(bq));
  }
  return t;
}

double kmedian_cost(const std::vector<int>& cluster, const ClusterInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (int c : cluster) {
    double s = 0.0;
    for (int x : cluster) s += inst.d(c, x);
    best = std::min(best, s);
  }
  return best;
}

Clustering prune_tree(const ClusterTree& tree, int k, const ClusterInstance& inst) {
  const int n = tree.n;
  if (k < 1 || k > n) throw std::invalid_argument("prune_tree: k must lie in [1, n]");
  if (inst.n() != n || tree.members.size() != static_cast<std::size_t>(2 * n - 1))
    throw std::invalid_argument("prune_tree: tree does not match the instance");
  const auto nodes = static_cast<std::size_t>(2 * n - 1);
  const auto K = static_cast<std::size_t>(k);
  const double inf = std::numeric_limits<double>::infinity();
  // best[v][j]: cheapest pruning of v's subtree into j clusters; split[v][j]
  // is the number given to the left child (0 = keep v whole).
  std::vector<std::vector<double>> best(nodes, std::vector<double>(K + 1, inf));
  std::vector<std::vector<int>> split(nodes, std::vector<int>(K + 1, 0));
  for (std::size_t v = 0; v < nodes; ++v) {
    best[v][1] = kmedian_cost(tree.members[v], inst);
    if (v < static_cast<std::size_t>(n)) continue;
    const auto& m = tree.merges[v - static_cast<std::size_t>(n)];
    const auto L = static_cast<std::size_t>(m.left), R = static_cast<std::size_t>(m.right);
    const std::size_t cap = std::min(K, tree.members[v].size());
    for (std::size_t j = 2; j <= cap; ++j)
      for (std::size_t j1 = 1; j1 < j; ++j1) {
        const double c = best[L][j1] + best[R][j - j1];
        if (c < best[v][j]) {
          best[v][j] = c;
          split[v][j] = static_cast<int>(j1);
        }
      }
  }
  Clustering out;
  out.cost = best[nodes - 1][K];
  std::vector<std::pair<std::size_t, std::size_t>> stack{{nodes - 1, K}};
  while (!stack.empty()) {
    const auto [v, j] = stack.back();
    stack.pop_back();
    const int s = split[v][j];
    if (s == 0) {
      out.clusters.push_back(tree.members[v]);
      continue;
    }
    const auto& m = tree.merges[v - static_cast<std::size_t>(n)];
    stack.emplace_back(static_cast<std::size_t>(m.left), static_cast<std::size_t>(s));
    stack.emplace_back(static_cast<std::size_t>(m.right), j - static_cast<std::size_t>(s));
  }
  std::sort(out.clusters.begin(), out.clusters.end());
  return out;
}

TreeUtility pair_agreement_utility(const ClusterInstance& inst, std::vector<int> labels, int k) {
  if (labels.size() != static_cast<std::size_t>(inst.n())) throw std::invalid_argument("pair utility: need one label per point");
  if (inst.n() < 2) throw std::invalid_argument("pair utility: need at least two points");
  return [inst, labels = std::move(labels), k](const ClusterTree& t) {
    const auto c = prune_tree(t, k, inst);
    std::vector<int> assign(labels.size());
    for (std::size_t i = 0; i < c.clusters.size(); ++i)
      for (int x : c.clusters[i]) assign[static_cast<std::size_t>(x)] = static_cast<int>(i);
    std::size_t agree = 0, total = 0;
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t b = a + 1; b < labels.size(); ++b) {
        agree += (assign[a] == assign[b]) == (labels[a] == labels[b]);
        ++total;
      }
    return static_cast<double>(agree) / static_cast<double>(total);
  };
}

C2Decomposition c2_decomposition(const ClusterInstance& inst, const TreeUtility& utility) {
  if (inst.n() > 40) throw std::invalid_argument("c2_breakpoints: n must be <= 40");
  const int n = inst.n();
  using Seq = std::vector<Merge>;
  auto solve = [&](double rho) { return agglomerate(inst, MergeFamily::C2, rho).merges; };
  // Replays the shared prefix, then intersects the two lines
  // mx + rho (mn - mx) of the first merges on which the sequences differ.
  auto crossing = [&](const Seq& a, const Seq& b, double, double) -> std::optional<double> {
    std::size_t t = 0;
    while (t < a.size() && a[t] == b[t]) ++t;
    if (t == a.size()) return std::nullopt;
    std::vector<std::vector<int>> members;
    for (int i = 0; i < n; ++i) members.push_back({i});
    for (std::size_t s = 0; s < t; ++s) {
      auto m = members[static_cast<std::size_t>(a[s].left)];
      const auto& r = members[static_cast<std::size_t>(a[s].right)];
      m.insert(m.end(), r.begin(), r.end());
      members.push_back(std::move(m));
    }
    const auto P = extremes(members[static_cast<std::size_t>(a[t].left)], members[static_cast<std::size_t>(a[t].right)], inst);
    const auto Q = extremes(members[static_cast<std::size_t>(b[t].left)], members[static_cast<std::size_t>(b[t].right)], inst);
    const double den = (P.mn - P.mx) - (Q.mn - Q.mx);
    if (den == 0.0) return std::nullopt;
    return (Q.mx - P.mx) / den;
  };
  ParametricOptions opt;
  opt.verify_midpoint = true;
  const auto segs = parametric_partition<Seq>(0.0, 1.0, solve, crossing, opt);

  C2Decomposition d{PiecewiseFunction1D::constant(0.0, 1.0, 0.0), {}};
  std::vector<double> bps;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i > 0) bps.push_back(segs[i].start);
    const double end = i + 1 < segs.size() ? segs[i + 1].start : 1.0;
    ClusterTree tree = agglomerate(inst, MergeFamily::C2, segs[i].start + (end - segs[i].start) / 2.0);
    if (!(tree.merges == segs[i].solution)) {
      // Only possible for segments narrower than the split tolerance.
      tree = agglomerate(inst, MergeFamily::C2, segs[i].start);
    }
    pieces.push_back({0.0, utility(tree), static_cast<std::int64_t>(i)});
    d.trees.push_back(std::move(tree));
  }
  d.partition = PiecewiseFunction1D(0.0, 1.0, std::move(bps), std::move(pieces));
  return d;
}

PiecewiseFunction1D c2_breakpoints(const ClusterInstance& inst, const TreeUtility& utility) {
  const auto d = c2_decomposition(inst, utility);
  std::vector<Piece> pieces;
  for (const auto& p : d.partition.pieces()) pieces.push_back({0.0, p.intercept, 0});
  return merge_equal_values(PiecewiseFunction1D(0.0, 1.0, d.partition.breakpoints(), std::move(pieces)), 0.0);
}

}  // namespace algotune
