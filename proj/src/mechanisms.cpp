#include "algotune/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace algotune {

ValuationProfile::ValuationProfile(int n_agents, int n_alternatives, std::vector<Entry> entries)
    : n_(n_agents), m_(n_alternatives) {
  if (n_ < 1 || m_ < 1) throw std::invalid_argument("valuation profile: need at least one agent and one alternative");
  for (const auto& e : entries) {
    if (e.agent < 0 || e.agent >= n_ || e.alt < 0 || e.alt >= m_)
      throw std::invalid_argument("valuation profile: entry out of range");
    if (!std::isfinite(e.value)) throw std::invalid_argument("valuation profile: values must be finite");
    if (e.value != 0.0) entries_.push_back(e);
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.agent != b.agent ? a.agent < b.agent : a.alt < b.alt; });
  for (std::size_t k = 1; k < entries_.size(); ++k)
    if (entries_[k].agent == entries_[k - 1].agent && entries_[k].alt == entries_[k - 1].alt)
      throw std::invalid_argument("valuation profile: duplicate entry");
}

ValuationProfile ValuationProfile::dense(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("valuation profile: empty matrix");
  std::vector<Entry> e;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw std::invalid_argument("valuation profile: ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) e.push_back({static_cast<int>(i), static_cast<int>(j), rows[i][j]});
  }
  return ValuationProfile(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), std::move(e));
}

double ValuationProfile::value(int agent, int alt) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{agent, alt}, [](const Entry& e, const auto& key) {
    return e.agent != key.first ? e.agent < key.first : e.alt < key.second;
  });
  return it != entries_.end() && it->agent == agent && it->alt == alt ? it->value : 0.0;
}

std::vector<std::vector<double>> ValuationProfile::to_dense() const {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n_), std::vector<double>(static_cast<std::size_t>(m_), 0.0));
  for (const auto& e : entries_) rows[static_cast<std::size_t>(e.agent)][static_cast<std::size_t>(e.alt)] = e.value;
  return rows;
}

void NamParams::validate(int n_agents) const {
  if (weights.size() != static_cast<std::size_t>(n_agents))
    throw std::invalid_argument("NAM params: need one weight per agent");
  bool sink = false;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0) throw std::invalid_argument("NAM params: weights must be finite and >= 0");
    sink = sink || w == 0.0;
  }
  if (!sink) throw std::invalid_argument("NAM params: at least one agent must have weight zero");
}

namespace {

void check_nam(const ValuationProfile& v, const NamParams& p) {
  if (v.n_agents() < 2 || v.n_alternatives() < 2) throw std::invalid_argument("NAM: need n >= 2 agents and m >= 2 alternatives");
  p.validate(v.n_agents());
}

// sum_{i != skip} rho_i v_i(j) for every j.
std::vector<double> weighted_totals(const ValuationProfile& v, const NamParams& p, int skip = -1) {
  std::vector<double> t(static_cast<std::size_t>(v.n_alternatives()), 0.0);
  for (const auto& e : v.entries())
    if (e.agent != skip) t[static_cast<std::size_t>(e.alt)] += p.weights[static_cast<std::size_t>(e.agent)] * e.value;
  return t;
}

int first_argmax(const std::vector<double>& t) {
  return static_cast<int>(std::max_element(t.begin(), t.end()) - t.begin());
}

}  // namespace

int nam_outcome(const ValuationProfile& v, const NamParams& p) {
  check_nam(v, p);
  return first_argmax(weighted_totals(v, p));
}

std::vector<double> nam_payments(const ValuationProfile& v, const NamParams& p) {
  check_nam(v, p);
  const auto star = static_cast<std::size_t>(nam_outcome(v, p));
  const int n = v.n_agents();
  std::vector<double> pay(static_cast<std::size_t>(n), 0.0);
  int sink = -1;
  double collected = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rho = p.weights[static_cast<std::size_t>(i)];
    if (rho == 0.0) {
      if (sink < 0) sink = i;
      continue;
    }
    const auto others = weighted_totals(v, p, i);
    const auto alt = static_cast<std::size_t>(first_argmax(others));
    pay[static_cast<std::size_t>(i)] = (others[star] - others[alt]) / rho;
    collected += pay[static_cast<std::size_t>(i)];
  }
  pay[static_cast<std::size_t>(sink)] = -collected;
  return pay;
}

double nam_welfare(const ValuationProfile& v, const NamParams& p) {
  const int j = nam_outcome(v, p);
  double s = 0.0;
  for (const auto& e : v.entries())
    if (e.alt == j) s += e.value;
  return s;
}

NamShatterInstances nam_shatter_instances(int n, double epsilon) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("nam_shatter_instances: n must be even and >= 2");
  if (n > 48) throw std::invalid_argument("nam_shatter_instances: n must be <= 48");
  if (!(epsilon > 0 && epsilon < 0.5)) throw std::invalid_argument("nam_shatter_instances: epsilon must lie in (0, 1/2)");
  const int N = n / 2;
  NamShatterInstances out;
  for (int l = 0; l < N; ++l) out.profiles.emplace_back(n, 2, std::vector<ValuationProfile::Entry>{{l, 0, 1.0}, {N + l, 1, epsilon}});
  const std::uint64_t count = std::uint64_t{1} << N;
  if (N <= 16) {
    out.params.reserve(count);
    for (std::uint64_t b = 0; b < count; ++b) {
      NamParams p{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
      for (int l = 0; l < N; ++l) {
        const bool bit = (b >> l) & 1u;
        p.weights[static_cast<std::size_t>(l)] = bit ? 1.0 : 0.0;
        p.weights[static_cast<std::size_t>(N + l)] = bit ? 0.0 : 1.0;
      }
      out.params.push_back(std::move(p));
    }
  }
  out.witnesses.assign(static_cast<std::size_t>(N), 0.5);
  return out;
}

// Walks every bit vector b without materializing parameters, so it also
// covers n/2 > 16 where `params` is left empty.
ShatteringCertificate verify_nam_shattering(const NamShatterInstances& inst) {
  const int N = static_cast<int>(inst.profiles.size());
  if (N == 0 || N > 24) throw std::invalid_argument("verify_nam_shattering: need 1 <= n/2 <= 24");
  const int n = inst.profiles[0].n_agents();
  ShatteringCertificate c;
  c.n = N;
  c.witnesses = inst.witnesses;
  const std::uint64_t count = std::uint64_t{1} << N;
  std::vector<char> seen(count, 0);
  NamParams p{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  for (std::uint64_t b = 0; b < count; ++b) {
    if (!inst.params.empty()) {
      p = inst.params[b];
    } else {
      for (int l = 0; l < N; ++l) {
        const bool bit = (b >> l) & 1u;
        p.weights[static_cast<std::size_t>(l)] = bit ? 1.0 : 0.0;
        p.weights[static_cast<std::size_t>(N + l)] = bit ? 0.0 : 1.0;
      }
    }
    std::uint32_t pattern = 0;
    for (int l = 0; l < N; ++l)
      if (nam_welfare(inst.profiles[static_cast<std::size_t>(l)], p) >= inst.witnesses[static_cast<std::size_t>(l)])
        pattern |= std::uint32_t{1} << l;
    seen[pattern] = 1;
  }
  for (std::uint64_t q = 0; q < count; ++q)
    if (seen[q]) c.patterns_found.push_back(static_cast<std::uint32_t>(q));
  c.shattered = c.patterns_found.size() == count;
  return c;
}

namespace {

struct TopTwo {
  int winner = -1;
  double first = 0.0;
  double second = 0.0;
};

void check_bids(std::span<const double> bids) {
  if (bids.size() < 2) throw std::invalid_argument("SPA: need at least two bids");
  for (double b : bids)
    if (!std::isfinite(b) || b < 0) throw std::invalid_argument("SPA: bids must be finite and >= 0");
}

TopTwo top_two(std::span<const double> bids) {
  TopTwo t;
  for (std::size_t i = 0; i < bids.size(); ++i)
    if (t.winner < 0 || bids[i] > t.first) {
      t.winner = static_cast<int>(i);
      t.first = bids[i];
    }
  t.second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bids.size(); ++i)
    if (static_cast<int>(i) != t.winner) t.second = std::max(t.second, bids[i]);
  return t;
}

// Bids of the sparse profile restricted to the agents that matter: every
// nonzero bidder plus the two lowest-index zero bidders, in agent order.
// Returns the agent id of each kept bid alongside.
std::pair<std::vector<double>, std::vector<int>> compact_bids(const ValuationProfile& v) {
  if (v.n_alternatives() != 1) throw std::invalid_argument("SPA: profile must have a single alternative");
  if (v.n_agents() < 2) throw std::invalid_argument("SPA: need at least two bids");
  const auto& e = v.entries();
  std::vector<int> zero_ids;
  std::size_t k = 0;
  for (int a = 0; a < v.n_agents() && zero_ids.size() < 2; ++a) {
    if (k < e.size() && e[k].agent == a) {
      ++k;
      continue;
    }
    zero_ids.push_back(a);
  }
  std::vector<double> bids;
  std::vector<int> agents;
  std::size_t z = 0;
  k = 0;
  while (k < e.size() || z < zero_ids.size()) {
    if (z == zero_ids.size() || (k < e.size() && e[k].agent < zero_ids[z])) {
      bids.push_back(e[k].value);
      agents.push_back(e[k].agent);
      ++k;
    } else {
      bids.push_back(0.0);
      agents.push_back(zero_ids[z]);
      ++z;
    }
  }
  return {bids, agents};
}

}  // namespace

double spa_revenue(std::span<const double> bids, const ReserveVector& reserves) {
  check_bids(bids);
  if (!reserves.anonymous() && reserves.values.size() != bids.size())
    throw std::invalid_argument("SPA: need one reserve per bidder or a single anonymous reserve");
  const TopTwo t = top_two(bids);
  const double r = reserves.for_agent(t.winner);
  if (t.first < r) return 0.0;
  return std::max(t.second, r);
}

double spa_revenue(const ValuationProfile& v, const ReserveVector& reserves) {
  if (!reserves.anonymous() && reserves.values.size() != static_cast<std::size_t>(v.n_agents()))
    throw std::invalid_argument("SPA: need one reserve per bidder or a single anonymous reserve");
  const auto [bids, agents] = compact_bids(v);
  check_bids(bids);
  const TopTwo t = top_two(bids);
  const double r = reserves.for_agent(agents[static_cast<std::size_t>(t.winner)]);
  if (t.first < r) return 0.0;
  return std::max(t.second, r);
}

PiecewiseFunction1D anonymous_reserve_dual(std::span<const double> bids, double hi) {
  check_bids(bids);
  if (!(hi > 0) || !std::isfinite(hi)) throw std::invalid_argument("anonymous_reserve_dual: hi must be positive");
  const TopTwo t = top_two(bids);
  const double v1 = t.first, v2 = t.second;
  // (start, piece) candidates; ones starting at or beyond hi are dropped.
  std::vector<std::pair<double, Piece>> segs{{0.0, Piece{0.0, v2, 0}}, {v2, Piece{1.0, 0.0, 0}}, {v1, Piece{0.0, 0.0, 0}}};
  std::vector<double> bps;
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double start = segs[k].first;
    const double end = k + 1 < segs.size() ? segs[k + 1].first : hi;
    if (start >= hi || !(end > start)) continue;
    if (!pieces.empty()) bps.push_back(start);
    pieces.push_back(segs[k].second);
  }
  return PiecewiseFunction1D(0.0, hi, std::move(bps), std::move(pieces));
}

PiecewiseFunction1D anonymous_reserve_dual(const ValuationProfile& v, double hi) {
  return anonymous_reserve_dual(compact_bids(v).first, hi);
}

ReserveVector overfit_reserves(std::span<const ValuationProfile> sample, std::span<const double> all_values,
                               double fallback) {
  if (!std::isfinite(fallback) || fallback < 0) throw std::invalid_argument("overfit_reserves: fallback must be >= 0");
  ReserveVector r{std::vector<double>(all_values.size(), fallback)};
  for (const auto& v : sample) {
    if (static_cast<std::size_t>(v.n_agents()) != all_values.size() || v.n_alternatives() != 1 || v.entries().size() != 1)
      throw std::invalid_argument("overfit_reserves: profile must have exactly one nonzero bidder among all agents");
    const auto& e = v.entries()[0];
    if (e.value != all_values[static_cast<std::size_t>(e.agent)])
      throw std::invalid_argument("overfit_reserves: profile value differs from w_" + std::to_string(e.agent));
    r.values[static_cast<std::size_t>(e.agent)] = e.value;
  }
  return r;
}

NamParams nam_overfit_params(const std::vector<int>& seen, int support_size) {
  if (support_size < 1) throw std::invalid_argument("nam_overfit_params: support size must be >= 1");
  const auto s = static_cast<std::size_t>(support_size);
  NamParams p{std::vector<double>(2 * s, 0.0)};
  for (std::size_t i = 0; i < s; ++i) p.weights[s + i] = 1.0;
  for (int i : seen) {
    if (i < 0 || i >= support_size) throw std::invalid_argument("nam_overfit_params: index out of range");
    p.weights[static_cast<std::size_t>(i)] = 1.0;
    p.weights[s + static_cast<std::size_t>(i)] = 0.0;
  }
  return p;
}

void FiniteDistribution::validate() const {
  if (support.empty()) throw std::invalid_argument("distribution: empty support");
  if (support.size() != probabilities.size()) throw std::invalid_argument("distribution: support and probabilities differ in size");
  double s = 0.0;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < 0) throw std::invalid_argument("distribution: probabilities must be >= 0");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("distribution: probabilities must sum to 1");
}

FiniteDistribution FiniteDistribution::uniform(std::vector<ValuationProfile> support) {
  if (support.empty()) throw std::invalid_argument("distribution: empty support");
  const double p = 1.0 / static_cast<double>(support.size());
  FiniteDistribution d{std::move(support), {}};
  d.probabilities.assign(d.support.size(), p);
  return d;
}

double expected_utility(const FiniteDistribution& dist, const ProfileUtility& u) {
  double s = 0.0;
  for (std::size_t k = 0; k < dist.support.size(); ++k)
    if (dist.probabilities[k] != 0.0) s += dist.probabilities[k] * u(dist.support[k]);
  return s;
}

nlohmann::json to_json(const ValuationProfile& v) {
  auto e = nlohmann::json::array();
  for (const auto& x : v.entries()) e.push_back({x.agent, x.alt, x.value});
  return {{"n_agents", v.n_agents()}, {"n_alternatives", v.n_alternatives()}, {"entries", e}};
}

nlohmann::json to_json(const FiniteDistribution& d) {
  auto s = nlohmann::json::array();
  for (const auto& v : d.support) s.push_back(to_json(v));
  return {{"support", s}, {"probabilities", d.probabilities}};
}

std::vector<double> RatingsTable::joke(int j) const {
  if (j < 0 || j >= n_jokes) throw std::out_of_range("ratings: joke index out of range");
  std::vector<double> out;
  for (const auto& r : rows)
    if (!std::isnan(r[static_cast<std::size_t>(j)])) out.push_back(r[static_cast<std::size_t>(j)]);
  return out;
}

namespace {

constexpr double kMissing = 99.0;

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::string norm = line;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::replace(norm.begin(), norm.end(), ';', ' ');
  std::istringstream ss(norm);
  ss.imbue(std::locale::classic());
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) return false;
    } catch (const std::logic_error&) {
      return false;
    }
  }
  return true;
}

}  // namespace

RatingsTable ingest_jester(std::istream& in, Normalization norm) {
  std::vector<std::vector<double>> raw;
  std::vector<int> line_of;
  std::string line;
  int lineno = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (raw.empty() && lineno == 1) continue;  // header
      throw std::invalid_argument("ratings line " + std::to_string(lineno) + ": invalid number");
    }
    if (!raw.empty() && row.size() != raw[0].size())
      throw std::invalid_argument("ratings line " + std::to_string(lineno) + ": inconsistent column count");
    raw.push_back(row);
    line_of.push_back(lineno);
  }
  if (raw.empty()) throw std::invalid_argument("ratings: no data rows");

  // A leading column that always equals the number of present ratings is a
  // count column, as in the public dataset's layout.
  bool count_col = raw[0].size() >= 2;
  for (const auto& r : raw) {
    if (!count_col) break;
    const auto present = std::count_if(r.begin() + 1, r.end(), [](double x) { return x != kMissing; });
    count_col = r[0] == static_cast<double>(present);
  }
  const std::size_t first = count_col ? 1 : 0;

  RatingsTable t;
  t.n_jokes = static_cast<int>(raw[0].size() - first);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    std::vector<double> out;
    for (std::size_t c = first; c < raw[k].size(); ++c) {
      const double x = raw[k][c];
      if (x == kMissing) {
        out.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      if (!(x >= -10.0 && x <= 10.0))
        throw std::invalid_argument("ratings: value out of [-10, 10] at row " + std::to_string(line_of[k]) + ", column " +
                                    std::to_string(c + 1));
      out.push_back(norm == Normalization::to_unit ? (x + 10.0) / 20.0 : x / 20.0);
    }
    t.rows.push_back(std::move(out));
  }
  return t;
}

RatingsTable ingest_jester_file(const std::string& path, Normalization norm) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open ratings file: " + path);
  return ingest_jester(f, norm);
}

namespace {

std::pair<std::size_t, std::size_t> spa_counts(std::span<const double> r, const SpaIntervals& iv) {
  std::size_t lo = 0, hi = 0;
  for (double x : r) {
    if (x >= iv.low_lo && x <= iv.low_hi) ++lo;
    if (x >= iv.high_lo && x <= iv.high_hi) ++hi;
  }
  return {lo, hi};
}

}  // namespace

std::vector<double> spa_values(std::span<const double> unit_ratings, const SpaIntervals& iv) {
  std::vector<double> w;
  for (double x : unit_ratings)
    if ((x >= iv.low_lo && x <= iv.low_hi) || (x >= iv.high_lo && x <= iv.high_hi)) w.push_back(x);
  return w;
}

FiniteDistribution build_spa_distribution(std::span<const double> unit_ratings, std::size_t threshold,
                                          const SpaIntervals& iv) {
  const auto [lo, hi] = spa_counts(unit_ratings, iv);
  if (lo < threshold || hi < threshold)
    throw std::invalid_argument("no qualifying joke: low=" + std::to_string(lo) + ", high=" + std::to_string(hi) +
                                ", threshold=" + std::to_string(threshold));
  return spa_distribution_from_values(spa_values(unit_ratings, iv));
}

int select_spa_joke(const RatingsTable& unit_table, std::size_t threshold, const SpaIntervals& iv) {
  std::string report;
  for (int j = 0; j < unit_table.n_jokes; ++j) {
    const auto r = unit_table.joke(j);
    const auto [lo, hi] = spa_counts(r, iv);
    if (lo >= threshold && hi >= threshold) return j;
    report += " joke " + std::to_string(j + 1) + ": low=" + std::to_string(lo) + " high=" + std::to_string(hi) + ";";
  }
  throw std::invalid_argument("no qualifying joke (threshold " + std::to_string(threshold) + "):" + report);
}

FiniteDistribution spa_distribution_from_values(std::span<const double> w) {
  if (w.size() < 2) throw std::invalid_argument("SPA distribution: need at least two values");
  std::vector<ValuationProfile> support;
  support.reserve(w.size());
  const int n = static_cast<int>(w.size());
  for (int i = 0; i < n; ++i) {
    if (!(w[static_cast<std::size_t>(i)] > 0)) throw std::invalid_argument("SPA distribution: values must be positive");
    support.emplace_back(n, 1, std::vector<ValuationProfile::Entry>{{i, 0, w[static_cast<std::size_t>(i)]}});
  }
  return FiniteDistribution::uniform(std::move(support));
}

NamGroups nam_groups(const RatingsTable& centered, int joke1, int joke2, const NamGroupRule& rule) {
  if (joke1 < 0 || joke2 < 0 || joke1 >= centered.n_jokes || joke2 >= centered.n_jokes)
    throw std::out_of_range("nam_groups: joke index out of range");
  NamGroups g;
  for (const auto& r : centered.rows) {
    const double a = r[static_cast<std::size_t>(joke1)], b = r[static_cast<std::size_t>(joke2)];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a >= rule.a1_joke1_min && b <= rule.a1_joke2_max) g.a1.emplace_back(a, b);
    if (a <= rule.a2_joke1_max && b > rule.a2_joke2_lo && b <= rule.a2_joke2_hi) g.a2.emplace_back(a, b);
  }
  return g;
}

FiniteDistribution build_nam_distribution(const NamGroups& groups, int count, std::uint64_t seed) {
  if (groups.a1.empty() || groups.a2.empty()) throw std::invalid_argument("NAM distribution: empty group");
  if (count < 1) throw std::invalid_argument("NAM distribution: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> d1(0, groups.a1.size() - 1), d2(0, groups.a2.size() - 1);
  std::vector<ValuationProfile> support;
  support.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto x = groups.a1[d1(rng)];
    const auto y = groups.a2[d2(rng)];
    support.emplace_back(2 * count, 2,
                         std::vector<ValuationProfile::Entry>{
                             {i, 0, x.first}, {i, 1, x.second}, {count + i, 0, y.first}, {count + i, 1, y.second}});
  }
  return FiniteDistribution::uniform(std::move(support));
}

std::vector<double> synthetic_spa_values(std::size_t n_low, std::size_t n_high, std::uint64_t seed,
                                         const SpaIntervals& iv) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lo(iv.low_lo, iv.low_hi), hi(iv.high_lo, iv.high_hi);
  std::vector<double> w;
  w.reserve(n_low + n_high);
  for (std::size_t i = 0; i < n_low; ++i) w.push_back(lo(rng));
  for (std::size_t i = 0; i < n_high; ++i) w.push_back(hi(rng));
  return w;
}

NamGroups synthetic_nam_groups(std::size_t n1, std::size_t n2, std::uint64_t seed, const NamGroupRule& rule) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> a1x(rule.a1_joke1_min, 0.5), a1y(-0.5, rule.a1_joke2_max);
  std::uniform_real_distribution<double> a2x(-0.5, rule.a2_joke1_max), a2y(rule.a2_joke2_lo, rule.a2_joke2_hi);
  NamGroups g;
  for (std::size_t i = 0; i < n1; ++i) g.a1.emplace_back(a1x(rng), a1y(rng));
  for (std::size_t i = 0; i < n2; ++i) {
    const double x = a2x(rng);
    double y = a2y(rng);
    if (y <= rule.a2_joke2_lo) y = rule.a2_joke2_hi;  // keep the lower end open
    g.a2.emplace_back(x, y);
  }
  return g;
}

}  // namespace algotune
