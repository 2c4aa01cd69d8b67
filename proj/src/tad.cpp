#include "algotune/tad.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "algotune/bounds.hpp"
#include "algotune/parametric.hpp"

namespace algotune {

ContactMatrix::ContactMatrix(std::vector<std::vector<double>> rows) : n_(static_cast<int>(rows.size())) {
  if (n_ < 2) throw std::invalid_argument("contact matrix: need n >= 2");
  data_.reserve(rows.size() * rows.size());
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw std::invalid_argument("contact matrix: not square");
    for (double v : r) {
      if (!std::isfinite(v) || v < 0) throw std::invalid_argument("contact matrix: entries must be finite and >= 0");
      data_.push_back(v);
    }
  }
  for (int p = 1; p <= n_; ++p)
    for (int q = p + 1; q <= n_; ++q)
      if (std::fabs((*this)(p, q) - (*this)(q, p)) > 1e-12 * std::max(1.0, std::fabs((*this)(p, q))))
        throw std::invalid_argument("contact matrix: not symmetric");
}

ContactMatrix read_contact_matrix(std::istream& in) {
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
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("contact matrix line " + std::to_string(lineno) + ": invalid number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return ContactMatrix(std::move(rows));
}

TadWeights precompute_cij(const ContactMatrix& m) {
  const int n = m.n();
  const auto N = static_cast<std::size_t>(n + 2);
  // T(i, j) = sum over i <= p < q <= j of M_pq; T(i, i) = T(i, i - 1) = 0.
  std::vector<double> T(N * N, 0.0);
  auto t = [&](int i, int j) -> double& { return T[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j)]; };
  for (int d = 1; d < n; ++d)
    for (int i = 1; i + d <= n; ++i) {
      const int j = i + d;
      t(i, j) = t(i, j - 1) + t(i + 1, j) - (d >= 2 ? t(i + 1, j - 1) : 0.0) + m(i, j);
    }
  std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
  for (int d = 1; d < n; ++d) {
    double s = 0.0;
    for (int i = 1; i + d <= n; ++i) s += t(i, i + d);
    mean[static_cast<std::size_t>(d)] = s / static_cast<double>(n - d);
  }
  TadWeights w(n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) w.set(i, j, t(i, j) - mean[static_cast<std::size_t>(j - i)]);
  return w;
}

TadSet make_tad_set(std::vector<std::pair<int, int>> intervals) {
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const auto [i, j] = intervals[k];
    if (i < 1 || j <= i) throw std::invalid_argument("TAD set: intervals need 1 <= i < j");
    if (k > 0 && !(intervals[k - 1].second < i)) throw std::invalid_argument("TAD set: intervals must be ordered and non-touching");
  }
  return TadSet{std::move(intervals)};
}

double tad_objective(const TadWeights& w, const TadSet& t, double rho) {
  double s = 0.0;
  for (const auto& [i, j] : t.intervals) s += w(i, j) * std::pow(static_cast<double>(j - i), -rho);
  return s;
}

namespace {

struct Best {
  double v = 0.0;
  int c = 0;
};

bool ties(const Best& x, const Best& y) {
  return x.c == y.c && std::fabs(x.v - y.v) <= 1e-12 * std::max(1.0, std::fabs(y.v));
}

bool better(const Best& x, const Best& y) {
  if (std::fabs(x.v - y.v) > 1e-12 * std::max(1.0, std::fabs(y.v))) return x.v > y.v;
  return x.c < y.c;
}

}  // namespace

// Suffix DP: G[p] is the best set using positions p..n. Reconstruction walks
// left to right and takes an interval starting at p (shortest first) whenever
// it is co-optimal, which yields the lexicographically smallest set among
// optimal sets of minimum size.
TadResult tad_optimize(const TadWeights& w, double rho, int min_length) {
  if (!(rho >= 0) || !std::isfinite(rho)) throw std::invalid_argument("tad_optimize: rho must be finite and >= 0");
  if (min_length < 1) throw std::invalid_argument("tad_optimize: minimum length must be >= 1");
  const int n = w.n();
  std::vector<double> scale(static_cast<std::size_t>(n), 0.0);
  for (int d = 1; d < n; ++d) scale[static_cast<std::size_t>(d)] = std::pow(static_cast<double>(d), -rho);
  auto val = [&](int i, int j) { return w(i, j) * scale[static_cast<std::size_t>(j - i)]; };

  std::vector<Best> G(static_cast<std::size_t>(n + 2));
  auto take = [&](int p, int j) {
    const Best& rest = G[static_cast<std::size_t>(j + 1)];
    return Best{val(p, j) + rest.v, rest.c + 1};
  };
  for (int p = n; p >= 1; --p) {
    Best best = G[static_cast<std::size_t>(p + 1)];
    for (int j = p + min_length; j <= n; ++j) {
      const Best cand = take(p, j);
      if (better(cand, best)) best = cand;
    }
    G[static_cast<std::size_t>(p)] = best;
  }
  TadResult r;
  int p = 1;
  while (p <= n) {
    const Best target = G[static_cast<std::size_t>(p)];
    int chosen = -1;
    for (int j = p + min_length; j <= n && chosen < 0; ++j)
      if (ties(take(p, j), target)) chosen = j;
    if (chosen < 0) {
      ++p;
      continue;
    }
    r.tads.intervals.emplace_back(p, chosen);
    p = chosen + 1;
  }
  r.objective = tad_objective(w, r.tads, rho);
  return r;
}

double TadDecomposition::objective_at(const TadWeights& w, double rho) const {
  return tad_objective(w, sets.at(static_cast<std::size_t>(partition.pieces()[partition.piece_index(rho)].tag)), rho);
}

TadDecomposition rho_decomposition(const TadWeights& w, double rho_hi, double tol, int min_length) {
  if (!(rho_hi > 0) || !std::isfinite(rho_hi)) throw std::invalid_argument("rho_decomposition: rho_hi must be positive");
  if (!(tol > 0)) throw std::invalid_argument("rho_decomposition: tol must be positive");
  bool cap_hit = false;
  auto solve = [&](double rho) { return tad_optimize(w, rho, min_length).tads; };
  auto crossing = [&](const TadSet& a, const TadSet& b, double lo, double hi) -> std::optional<double> {
    std::vector<ExpTerm> terms;
    for (const auto& [i, j] : a.intervals) terms.push_back({w(i, j), static_cast<double>(j - i)});
    for (const auto& [i, j] : b.intervals) terms.push_back({-w(i, j), static_cast<double>(j - i)});
    const auto roots = exp_sum_roots_checked(terms, lo, hi, tol / 4.0);
    cap_hit = cap_hit || roots.hit_cap;
    for (double x : roots.roots)
      if (x > lo && x < hi) return x;
    return std::nullopt;
  };
  ParametricOptions opt;
  opt.tol = tol;
  opt.verify_midpoint = true;
  const auto segs = parametric_partition<TadSet>(0.0, rho_hi, solve, crossing, opt);

  TadDecomposition d{PiecewiseFunction1D::constant(0.0, rho_hi, 0.0), {}, cap_hit};
  std::vector<double> bps;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double start = segs[i].start;
    const double end = i + 1 < segs.size() ? segs[i + 1].start : rho_hi;
    if (i > 0) bps.push_back(start);
    pieces.push_back({0.0, tad_objective(w, segs[i].solution, start + (end - start) / 2.0), static_cast<std::int64_t>(i)});
    d.sets.push_back(segs[i].solution);
  }
  d.partition = PiecewiseFunction1D(0.0, rho_hi, std::move(bps), std::move(pieces));
  return d;
}

double tad_utility(const TadSet& candidate, const TadSet& truth) {
  if (candidate.intervals.empty()) return truth.intervals.empty() ? 1.0 : 0.0;
  std::set<std::pair<int, int>> t(truth.intervals.begin(), truth.intervals.end());
  std::size_t shared = 0;
  for (const auto& iv : candidate.intervals) shared += t.count(iv);
  return static_cast<double>(shared) / static_cast<double>(candidate.intervals.size());
}

PiecewiseFunction1D tad_utility_breakpoints(const TadDecomposition& d, const TadSet& truth) {
  std::vector<Piece> pieces;
  for (const auto& p : d.partition.pieces())
    pieces.push_back({0.0, tad_utility(d.sets.at(static_cast<std::size_t>(p.tag)), truth), 0});
  return merge_equal_values(
      PiecewiseFunction1D(d.partition.lo(), d.partition.hi(), d.partition.breakpoints(), std::move(pieces)));
}

nlohmann::json to_json(const TadSet& t) {
  auto iv = nlohmann::json::array();
  for (const auto& [i, j] : t.intervals) iv.push_back({i, j});
  return {{"intervals", iv}};
}

TadSet tad_set_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::pair<int, int>> iv;
    for (const auto& p : j.at("intervals")) iv.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return make_tad_set(std::move(iv));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("TAD set JSON: ") + e.what());
  }
}

}  // namespace algotune
