#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "algotune/bounds.hpp"
#include "algotune/piecewise.hpp"
#include "json.hpp"

namespace algotune {

// n agents x m alternatives. Only nonzero values are stored, so profiles
// with thousands of mostly idle agents stay small. Agents and alternatives
// are 0-based.
class ValuationProfile {
 public:
  struct Entry {
    int agent;
    int alt;
    double value;
  };

  ValuationProfile(int n_agents, int n_alternatives, std::vector<Entry> entries);
  // rows[i][j] = v_i(j).
  static ValuationProfile dense(const std::vector<std::vector<double>>& rows);

  int n_agents() const { return n_; }
  int n_alternatives() const { return m_; }
  const std::vector<Entry>& entries() const { return entries_; }
  double value(int agent, int alt) const;
  std::vector<std::vector<double>> to_dense() const;

 private:
  int n_;
  int m_;
  std::vector<Entry> entries_;  // sorted by (agent, alt), no zeros
};

struct NamParams {
  std::vector<double> weights;

  // Nonnegative finite weights with at least one sink (zero weight).
  void validate(int n_agents) const;
};

// Alternative maximizing sum_i rho_i v_i(j), lowest index on ties.
int nam_outcome(const ValuationProfile& v, const NamParams& p);

// Payment formula with the sign convention as written. p_i is read as a
// transfer to agent i, so agent i's quasilinear utility is v_i(j*) + p_i.
// Non-sink agents get (1/rho_i)(sum_{i' != i} rho_i' v_i'(j*) - sum_{i' != i}
// rho_i' v_i'(j_-i)); the lowest-index sink gets minus the sum of those and
// every other sink 0.
std::vector<double> nam_payments(const ValuationProfile& v, const NamParams& p);

double nam_welfare(const ValuationProfile& v, const NamParams& p);

struct NamShatterInstances {
  std::vector<ValuationProfile> profiles;  // n/2 profiles, 2 alternatives
  std::vector<NamParams> params;           // 2^(n/2), indexed by bit vector b
  std::vector<double> witnesses;           // all 1/2
};

NamShatterInstances nam_shatter_instances(int n, double epsilon);
ShatteringCertificate verify_nam_shattering(const NamShatterInstances& inst);

// A single reserve is anonymous; otherwise one reserve per agent.
struct ReserveVector {
  std::vector<double> values;

  bool anonymous() const { return values.size() == 1; }
  double for_agent(int i) const { return anonymous() ? values[0] : values.at(static_cast<std::size_t>(i)); }
};

double spa_revenue(std::span<const double> bids, const ReserveVector& reserves);
// Single-item profile: alternative 0 holds the bids.
double spa_revenue(const ValuationProfile& v, const ReserveVector& reserves);

// Revenue of the anonymous SPA as a function of the reserve on [0, hi].
// Pieces are half-open, so at rho = v(1) exactly the function reads 0 while
// the auction earns v(1); the two differ only at that point.
PiecewiseFunction1D anonymous_reserve_dual(std::span<const double> bids, double hi);
PiecewiseFunction1D anonymous_reserve_dual(const ValuationProfile& v, double hi);

// all_values[i] is w_i; profile i has agent i as the sole bidder with value
// w_i. Seen agents get reserve w_i, unseen ones get `fallback`.
ReserveVector overfit_reserves(std::span<const ValuationProfile> sample, std::span<const double> all_values,
                               double fallback = 0.75);

// Agents 0..s-1 and s..2s-1 pair up; seen i -> (1, 0), unseen i -> (0, 1).
NamParams nam_overfit_params(const std::vector<int>& seen, int support_size);

struct FiniteDistribution {
  std::vector<ValuationProfile> support;
  std::vector<double> probabilities;

  void validate() const;
  static FiniteDistribution uniform(std::vector<ValuationProfile> support);
};

using ProfileUtility = std::function<double(const ValuationProfile&)>;

double expected_utility(const FiniteDistribution& dist, const ProfileUtility& u);

nlohmann::json to_json(const ValuationProfile& v);
nlohmann::json to_json(const FiniteDistribution& d);

enum class Normalization { to_unit, to_centered };

// users x jokes, NaN where the rating is missing.
struct RatingsTable {
  std::vector<std::vector<double>> rows;
  int n_jokes = 0;

  // Non-missing ratings of one joke (0-based), in user order.
  std::vector<double> joke(int j) const;
};

RatingsTable ingest_jester(std::istream& in, Normalization norm);
RatingsTable ingest_jester_file(const std::string& path, Normalization norm);

struct SpaIntervals {
  double low_lo = 0.25, low_hi = 0.5;
  double high_lo = 0.75, high_hi = 1.0;
};

// Keeps the ratings lying in either interval, in order, and requires at least
// `threshold` in each. Profile i has agent i bidding w_i.
FiniteDistribution build_spa_distribution(std::span<const double> unit_ratings, std::size_t threshold = 5000,
                                          const SpaIntervals& iv = {});
std::vector<double> spa_values(std::span<const double> unit_ratings, const SpaIntervals& iv = {});
// First joke passing both thresholds; the error lists every joke's counts.
int select_spa_joke(const RatingsTable& unit_table, std::size_t threshold = 5000, const SpaIntervals& iv = {});
// Uniform over profiles with one bidder each.
FiniteDistribution spa_distribution_from_values(std::span<const double> w);

struct NamGroupRule {
  double a1_joke1_min = 0.35;
  double a1_joke2_max = 0.0;
  double a2_joke1_max = 0.0;
  double a2_joke2_lo = 0.0;  // exclusive
  double a2_joke2_hi = 0.15;
};

struct NamGroups {
  std::vector<std::pair<double, double>> a1;
  std::vector<std::pair<double, double>> a2;
};

NamGroups nam_groups(const RatingsTable& centered, int joke1, int joke2, const NamGroupRule& rule = {});

// `count` profiles over 2 * count agents and 2 alternatives: agent i draws
// from A1 and agent count + i from A2, uniformly with the given seed.
FiniteDistribution build_nam_distribution(const NamGroups& groups, int count, std::uint64_t seed);

// Synthetic stand-ins for the rating data.
std::vector<double> synthetic_spa_values(std::size_t n_low, std::size_t n_high, std::uint64_t seed,
                                         const SpaIntervals& iv = {});
NamGroups synthetic_nam_groups(std::size_t n1, std::size_t n2, std::uint64_t seed, const NamGroupRule& rule = {});

}  // namespace algotune
