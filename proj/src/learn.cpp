#include "algotune/learn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "algotune/bounds.hpp"
#include "algotune/format.hpp"

namespace algotune {

ErmResult erm(std::span<const PiecewiseFunction1D> duals) {
  if (duals.empty()) throw std::invalid_argument("erm: need at least one dual");
  const auto avg = average(duals);
  const auto best = argmax(avg);
  // A maximizing constant piece is reported by an interior point: at its left
  // breakpoint the algorithm itself may resolve a tie differently.
  if (!best.attained_in_limit && best.param > avg.lo()) {
    const std::size_t i = avg.piece_index(best.param);
    if (avg.pieces()[i].slope == 0.0 && avg.piece_start(i) == best.param) return {avg.piece_probe(i), best.value};
  }
  return {best.param, best.value};
}

double estimation_error(const ProfileUtility& u, std::span<const ValuationProfile> sample,
                        const FiniteDistribution& dist) {
  if (sample.empty()) throw std::invalid_argument("estimation_error: empty sample");
  double s = 0.0;
  for (const auto& v : sample) s += u(v);
  return std::fabs(s / static_cast<double>(sample.size()) - expected_utility(dist, u));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::size_t t) {
  return splitmix64(splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(k))) ^ static_cast<std::uint64_t>(t));
}

namespace {

const char* const kFamilies[] = {"spa_nonanonymous_overfit", "spa_anonymous_erm", "nam_overfit"};

bool is_spa(const std::string& f) { return f.rfind("spa_", 0) == 0; }

}  // namespace

void ExperimentConfig::validate() const {
  if (std::find(std::begin(kFamilies), std::end(kFamilies), family) == std::end(kFamilies))
    throw std::invalid_argument("unknown experiment family '" + family + "'");
  if (schedule.empty()) throw std::invalid_argument("experiment: empty N schedule");
  for (long long n : schedule)
    if (n < 1) throw std::invalid_argument("experiment: every N must be >= 1");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("experiment: delta must lie in (0, 1)");
  if (threads < 1) throw std::invalid_argument("experiment: threads must be >= 1");
  if (nam_support < 1) throw std::invalid_argument("experiment: nam_support must be >= 1");
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  static const char* const known[] = {"family", "N", "trials", "seed", "delta", "threads", "ratings", "joke", "joke1",
                                      "joke2", "threshold", "spa_low", "spa_high", "fallback_reserve", "nam_group1",
                                      "nam_group2", "nam_support"};
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw std::invalid_argument("experiment config: unknown key '" + key + "'");
  ExperimentConfig c;
  try {
    c.family = j.at("family").get<std::string>();
    c.schedule = j.at("N").get<std::vector<long long>>();
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.delta = j.value("delta", c.delta);
    c.threads = j.value("threads", c.threads);
    c.ratings_path = j.value("ratings", c.ratings_path);
    c.joke = j.value("joke", c.joke);
    c.joke1 = j.value("joke1", c.joke1);
    c.joke2 = j.value("joke2", c.joke2);
    c.threshold = j.value("threshold", c.threshold);
    c.spa_low = j.value("spa_low", c.spa_low);
    c.spa_high = j.value("spa_high", c.spa_high);
    c.fallback_reserve = j.value("fallback_reserve", c.fallback_reserve);
    c.nam_group1 = j.value("nam_group1", c.nam_group1);
    c.nam_group2 = j.value("nam_group2", c.nam_group2);
    c.nam_support = j.value("nam_support", c.nam_support);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"family", c.family},         {"N", c.schedule},
          {"trials", c.trials},         {"seed", c.seed},
          {"delta", c.delta},           {"threads", c.threads},
          {"ratings", c.ratings_path},  {"joke", c.joke},
          {"joke1", c.joke1},           {"joke2", c.joke2},
          {"threshold", c.threshold},   {"spa_low", c.spa_low},
          {"spa_high", c.spa_high},     {"fallback_reserve", c.fallback_reserve},
          {"nam_group1", c.nam_group1}, {"nam_group2", c.nam_group2},
          {"nam_support", c.nam_support}};
}

namespace {

struct Setup {
  FiniteDistribution dist;
  std::vector<double> w;  // SPA values, one per support profile
  double hi = 1.0;        // SPA dual domain
  long long n_agents = 0;
};

Setup make_setup(const ExperimentConfig& c) {
  Setup s;
  // The distribution itself gets its own stream so changing trials or the
  // schedule never changes the support.
  const std::uint64_t dseed = splitmix64(c.seed ^ 0x5eedULL);
  if (is_spa(c.family)) {
    if (c.ratings_path.empty()) {
      s.w = synthetic_spa_values(c.spa_low, c.spa_high, dseed);
    } else {
      const auto table = ingest_jester_file(c.ratings_path, Normalization::to_unit);
      const int joke = c.joke >= 0 ? c.joke : select_spa_joke(table, c.threshold);
      const auto ratings = table.joke(joke);
      build_spa_distribution(ratings, c.threshold);  // threshold check
      s.w = spa_values(ratings);
    }
    s.dist = spa_distribution_from_values(s.w);
    s.hi = std::max(1.0, *std::max_element(s.w.begin(), s.w.end()));
  } else {
    NamGroups g;
    if (c.ratings_path.empty()) {
      g = synthetic_nam_groups(c.nam_group1, c.nam_group2, dseed);
    } else {
      g = nam_groups(ingest_jester_file(c.ratings_path, Normalization::to_centered), c.joke1, c.joke2);
    }
    s.dist = build_nam_distribution(g, c.nam_support, splitmix64(dseed));
  }
  s.n_agents = s.dist.support[0].n_agents();
  return s;
}

double run_trial(const ExperimentConfig& c, const Setup& s, long long N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(s.dist.probabilities.begin(), s.dist.probabilities.end());
  std::vector<ValuationProfile> sample;
  std::vector<int> seen_idx;
  std::vector<char> seen(s.dist.support.size(), 0);
  sample.reserve(static_cast<std::size_t>(N));
  for (long long k = 0; k < N; ++k) {
    const std::size_t i = pick(rng);
    sample.push_back(s.dist.support[i]);
    if (!seen[i]) {
      seen[i] = 1;
      seen_idx.push_back(static_cast<int>(i));
    }
  }
  if (c.family == "spa_nonanonymous_overfit") {
    const auto r = overfit_reserves(sample, s.w, c.fallback_reserve);
    return estimation_error([&](const ValuationProfile& v) { return spa_revenue(v, r); }, sample, s.dist);
  }
  if (c.family == "spa_anonymous_erm") {
    std::vector<PiecewiseFunction1D> duals;
    duals.reserve(sample.size());
    for (const auto& v : sample) duals.push_back(anonymous_reserve_dual(v, s.hi));
    const ReserveVector r{{erm(duals).rho_hat}};
    return estimation_error([&](const ValuationProfile& v) { return spa_revenue(v, r); }, sample, s.dist);
  }
  std::sort(seen_idx.begin(), seen_idx.end());
  const auto p = nam_overfit_params(seen_idx, c.nam_support);
  return estimation_error([&](const ValuationProfile& v) { return nam_welfare(v, p); }, sample, s.dist);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Setup s = make_setup(cfg);
  const std::size_t K = cfg.schedule.size(), T = static_cast<std::size_t>(cfg.trials);
  std::vector<double> errors(K * T, 0.0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t job = next++; job < K * T && !failed; job = next++) {
      try {
        const std::size_t k = job / T, t = job % T;
        errors[job] = run_trial(cfg, s, cfg.schedule[k], trial_seed(cfg.seed, k, t));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const auto nthreads = static_cast<std::size_t>(std::min<long long>(cfg.threads, static_cast<long long>(K * T)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult out;
  out.adversarial = cfg.family != "spa_anonymous_erm";
  for (std::size_t k = 0; k < K; ++k) {
    ExperimentRow row;
    row.N = cfg.schedule[k];
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      sum += errors[k * T + t];
      row.max_error = std::max(row.max_error, errors[k * T + t]);
    }
    row.mean_error = sum / static_cast<double>(T);
    if (T > 1) {
      double ss = 0.0;
      for (std::size_t t = 0; t < T; ++t) ss += (errors[k * T + t] - row.mean_error) * (errors[k * T + t] - row.mean_error);
      row.std_error = std::sqrt(ss / static_cast<double>(T - 1));
    }
    row.bound = is_spa(cfg.family) ? spa_estimation_bound(row.N, cfg.delta) : finite_class_bound(s.n_agents, row.N, cfg.delta);
    out.rows.push_back(row);
  }
  return out;
}

std::string experiment_csv(const ExperimentResult& r) {
  std::string s = r.adversarial ? "N,mean_error,std_error,bound,max_error\n" : "N,mean_error,std_error,bound\n";
  for (const auto& row : r.rows) {
    s += std::to_string(row.N) + "," + format_number(row.mean_error) + "," + format_number(row.std_error) + "," +
         format_number(row.bound);
    if (r.adversarial) s += "," + format_number(row.max_error);
    s += "\n";
  }
  return s;
}

}  // namespace algotune
