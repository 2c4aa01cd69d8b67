#include "algotune/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace algotune {

namespace {

void check_rho(double rho, const char* what) {
  if (!(rho >= 0) || !std::isfinite(rho)) throw std::invalid_argument(std::string(what) + ": rho must be finite and >= 0");
}

KnapsackResult pack(const KnapsackInstance& inst, const std::vector<double>& score) {
  std::vector<int> order(inst.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  KnapsackResult r;
  double used = 0.0;
  for (int i : order) {
    const auto k = static_cast<std::size_t>(i);
    if (used + inst.sizes[k] <= inst.capacity) {
      used += inst.sizes[k];
      r.items.push_back(i);
      r.total_value += inst.values[k];
    }
  }
  std::sort(r.items.begin(), r.items.end());
  return r;
}

// Sorted cell midpoints of [0, rho_max] cut at the given candidates.
std::vector<double> cells(std::vector<double> cand, double rho_max, std::vector<double>& cuts) {
  std::sort(cand.begin(), cand.end());
  cuts.clear();
  for (double c : cand)
    if (cuts.empty() || c - cuts.back() > kCmpEps * std::max(1.0, c)) cuts.push_back(c);
  std::vector<double> mids;
  double prev = 0.0;
  for (double c : cuts) {
    mids.push_back(prev + (c - prev) / 2.0);
    prev = c;
  }
  mids.push_back(prev + (rho_max - prev) / 2.0);
  return mids;
}

template <class Eval>
PiecewiseFunction1D constant_pieces(const std::vector<double>& candidates, double rho_max, Eval&& eval) {
  std::vector<double> cuts;
  const auto mids = cells(candidates, rho_max, cuts);
  std::vector<Piece> pieces;
  for (double m : mids) pieces.push_back({0.0, eval(m), 0});
  return merge_equal_values(PiecewiseFunction1D(0.0, rho_max, cuts, std::move(pieces)), 0.0);
}

}  // namespace

void KnapsackInstance::validate() const {
  if (values.size() != sizes.size()) throw std::invalid_argument("knapsack: values and sizes differ in length");
  if (!(capacity > 0) || !std::isfinite(capacity)) throw std::invalid_argument("knapsack: capacity must be positive");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0) || !(sizes[i] > 0) || !std::isfinite(values[i]) || !std::isfinite(sizes[i]))
      throw std::invalid_argument("knapsack: values and sizes must be positive");
}

KnapsackResult knapsack_greedy(const KnapsackInstance& inst, double rho) {
  inst.validate();
  check_rho(rho, "knapsack_greedy");
  std::vector<double> by_value = inst.values;
  std::vector<double> by_density(inst.values.size());
  for (std::size_t i = 0; i < by_density.size(); ++i) by_density[i] = inst.values[i] / std::pow(inst.sizes[i], rho);
  KnapsackResult a = pack(inst, by_value);
  KnapsackResult b = pack(inst, by_density);
  return b.total_value > a.total_value ? b : a;
}

PiecewiseFunction1D knapsack_breakpoints(const KnapsackInstance& inst, double rho_max) {
  inst.validate();
  if (!(rho_max > 0) || !std::isfinite(rho_max)) throw std::invalid_argument("knapsack_breakpoints: rho_max must be positive");
  std::vector<double> cand;
  const std::size_t n = inst.values.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double num = std::log(inst.values[i] / inst.values[j]);
      const double den = std::log(inst.sizes[i] / inst.sizes[j]);
      if (num == 0.0 || den == 0.0) continue;
      const double r = num / den;
      if (r > 0 && r < rho_max) cand.push_back(r);
    }
  return constant_pieces(cand, rho_max, [&](double rho) { return knapsack_greedy(inst, rho).total_value; });
}

KnapsackInstance read_knapsack_csv(std::istream& in, double capacity) {
  KnapsackInstance inst;
  inst.capacity = capacity;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("knapsack line " + std::to_string(lineno) + ": expected value,size");
    try {
      const double v = std::stod(line.substr(0, comma));
      const double s = std::stod(line.substr(comma + 1));
      inst.values.push_back(v);
      inst.sizes.push_back(s);
    } catch (const std::logic_error&) {
      if (lineno == 1) continue;
      throw std::invalid_argument("knapsack line " + std::to_string(lineno) + ": invalid number");
    }
  }
  inst.validate();
  return inst;
}

WeightedGraph::WeightedGraph(std::vector<double> weights) : weights_(std::move(weights)), adj_(weights_.size()) {
  for (double w : weights_)
    if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("graph: weights must be positive");
}

bool WeightedGraph::adjacent(int u, int v) const {
  const auto& a = adj_[static_cast<std::size_t>(u)];
  return std::find(a.begin(), a.end(), v) != a.end();
}

void WeightedGraph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= n() || v >= n()) throw std::invalid_argument("graph: vertex out of range");
  if (u == v) throw std::invalid_argument("graph: self-loops are not allowed");
  if (adjacent(u, v)) return;
  adj_[static_cast<std::size_t>(u)].push_back(v);
  adj_[static_cast<std::size_t>(v)].push_back(u);
}

WeightedGraph read_graph(std::istream& in) {
  std::vector<std::pair<int, int>> edges;
  std::vector<std::pair<int, double>> weights;
  int n = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first) || first[0] == '#') continue;
    auto fail = [&] { throw std::invalid_argument("graph line " + std::to_string(lineno) + ": malformed"); };
    if (first == "n") {
      if (!(ss >> n) || n < 0) fail();
    } else if (first == "w") {
      int v;
      double w;
      if (!(ss >> v >> w) || v < 0) fail();
      weights.emplace_back(v, w);
      n = std::max(n, v + 1);
    } else {
      int u, v;
      try {
        u = std::stoi(first);
      } catch (const std::logic_error&) {
        fail();
      }
      if (!(ss >> v) || u < 0 || v < 0) fail();
      edges.emplace_back(u, v);
      n = std::max({n, u + 1, v + 1});
    }
  }
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  for (const auto& [v, x] : weights) w[static_cast<std::size_t>(v)] = x;
  WeightedGraph g(std::move(w));
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

MwisResult mwis_greedy(const WeightedGraph& g, double rho) {
  check_rho(rho, "mwis_greedy");
  const int n = g.n();
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  std::vector<int> deg(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) deg[static_cast<std::size_t>(v)] = static_cast<int>(g.neighbors(v).size());
  auto remove = [&](int v) {
    alive[static_cast<std::size_t>(v)] = 0;
    for (int u : g.neighbors(v))
      if (alive[static_cast<std::size_t>(u)]) --deg[static_cast<std::size_t>(u)];
  };
  MwisResult r;
  while (true) {
    int best = -1;
    double best_score = 0.0;
    for (int v = 0; v < n; ++v) {
      if (!alive[static_cast<std::size_t>(v)]) continue;
      const double sc = g.weight(v) / std::pow(1.0 + deg[static_cast<std::size_t>(v)], rho);
      if (best < 0 || sc > best_score) {
        best = v;
        best_score = sc;
      }
    }
    if (best < 0) break;
    r.vertices.push_back(best);
    r.total_weight += g.weight(best);
    remove(best);
    for (int u : g.neighbors(best))
      if (alive[static_cast<std::size_t>(u)]) remove(u);
  }
  std::sort(r.vertices.begin(), r.vertices.end());
  return r;
}

PiecewiseFunction1D mwis_breakpoints(const WeightedGraph& g, double rho_max) {
  const int n = g.n();
  if (n > 30) throw std::invalid_argument("candidate explosion");
  if (!(rho_max > 0) || !std::isfinite(rho_max)) throw std::invalid_argument("mwis_breakpoints: rho_max must be positive");
  std::vector<double> num, den;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double x = std::log(g.weight(u) / g.weight(v));
      if (x != 0.0) num.push_back(std::fabs(x));
    }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) den.push_back(std::log((1.0 + b) / (1.0 + a)));
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(num);
  dedupe(den);
  // Both signs of each ratio appear among ordered pairs, so only positive
  // quotients of absolute values can land in (0, rho_max].
  std::vector<double> cand;
  for (double x : num)
    for (double y : den) {
      const double r = x / y;
      if (r > 0 && r < rho_max) cand.push_back(r);
    }
  return constant_pieces(cand, rho_max, [&](double rho) { return mwis_greedy(g, rho).total_weight; });
}

}  // namespace algotune
