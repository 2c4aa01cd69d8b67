#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "algotune/mechanisms.hpp"
#include "algotune/piecewise.hpp"
#include "json.hpp"

namespace algotune {

struct ErmResult {
  double rho_hat = 0.0;
  double train_value = 0.0;
};

// Leftmost maximizer of the average dual. When the maximum sits on a constant
// piece, the piece's interior probe point is returned instead of its left end.
ErmResult erm(std::span<const PiecewiseFunction1D> duals);

// |mean utility over the sample - expected utility under dist|.
double estimation_error(const ProfileUtility& u, std::span<const ValuationProfile> sample,
                        const FiniteDistribution& dist);

std::uint64_t splitmix64(std::uint64_t x);
// Seed for trial t of schedule entry k, independent of execution order.
std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::size_t t);

struct ExperimentConfig {
  std::string family;  // spa_nonanonymous_overfit | spa_anonymous_erm | nam_overfit
  std::vector<long long> schedule;
  int trials = 100;
  std::uint64_t seed = 0;
  double delta = 0.01;
  int threads = 1;

  // Instance source: empty for the synthetic stand-in, else a ratings CSV.
  std::string ratings_path;
  int joke = -1;  // SPA joke (0-based); -1 selects the first qualifying one
  int joke1 = 6, joke2 = 14;
  std::size_t threshold = 5000;

  std::size_t spa_low = 5334, spa_high = 5278;
  double fallback_reserve = 0.75;
  std::size_t nam_group1 = 870, nam_group2 = 1677;
  int nam_support = 500;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

struct ExperimentRow {
  long long N = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double max_error = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  bool adversarial = false;  // overfit families also report max_error
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV with header N,mean_error,std_error,bound[,max_error].
std::string experiment_csv(const ExperimentResult& r);

}  // namespace algotune
