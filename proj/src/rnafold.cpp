#include "algotune/rnafold.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace algotune {

namespace {

int base_code(char c) {
  switch (c) {
    case 'A': case 'a': return 0;
    case 'U': case 'u': return 1;
    case 'C': case 'c': return 2;
    case 'G': case 'g': return 3;
    default: return -1;
  }
}

bool watson_crick_pair(int x, int y) {
  return (x == 0 && y == 1) || (x == 1 && y == 0) || (x == 2 && y == 3) || (x == 3 && y == 2);
}

struct Score {
  double v = 0.0;
  int c = 0;
};

bool score_ties(const Score& x, const Score& y) {
  return x.c == y.c && std::fabs(x.v - y.v) <= 1e-12 * std::max(1.0, std::fabs(y.v));
}

bool score_better(const Score& x, const Score& y) {
  if (std::fabs(x.v - y.v) > 1e-12 * std::max(1.0, std::fabs(y.v))) return x.v > y.v;
  return x.c < y.c;
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("fold: rho must lie in [0,1]");
}

}  // namespace

RnaSequence parse_rna(const std::string& letters) {
  RnaSequence s;
  for (char c : letters) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    const int b = base_code(c == 'T' || c == 't' ? 'U' : c);
    if (b < 0) throw std::invalid_argument(std::string("RNA sequence: invalid base '") + c + "'");
    s.bases.push_back(b);
  }
  return s;
}

std::string to_string(const RnaSequence& s) {
  static const char* names = "AUCG";
  std::string out;
  for (int b : s.bases) out.push_back(names[b]);
  return out;
}

Folding make_folding(std::vector<std::pair<int, int>> pairs, int n) {
  std::sort(pairs.begin(), pairs.end());
  std::set<int> used;
  for (const auto& [i, j] : pairs) {
    if (i < 1 || j < i + 2) throw std::invalid_argument("folding: pairs need 1 <= i and i + 2 <= j");
    if (n > 0 && j > n) throw std::invalid_argument("folding: index beyond sequence length");
    if (!used.insert(i).second || !used.insert(j).second)
      throw std::invalid_argument("folding: index used by two pairs");
  }
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const auto [i, j] = pairs[a];
      const auto [k, l] = pairs[b];
      if (i < k && k < j && j < l) throw std::invalid_argument("folding: crossing pairs");
    }
  return Folding{std::move(pairs)};
}

StackScores StackScores::watson_crick() {
  StackScores m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          if (watson_crick_pair(a, b) && watson_crick_pair(c, d)) m.set(a, b, c, d, 1.0);
  return m;
}

void StackScores::set(int b1, int b2, int b3, int b4, double v) {
  for (int b : {b1, b2, b3, b4})
    if (b < 0 || b > 3) throw std::invalid_argument("stack scores: base out of range");
  if (!std::isfinite(v)) throw std::invalid_argument("stack scores: non-finite entry");
  table_[index(b1, b2, b3, b4)] = v;
}

StackScores read_stack_scores(std::istream& in) {
  StackScores m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw std::invalid_argument("stack scores line " + std::to_string(lineno) + ": expected 5 fields");
    int b[4];
    bool header = false;
    for (int k = 0; k < 4; ++k) {
      b[k] = cells[static_cast<std::size_t>(k)].size() == 1 ? base_code(cells[static_cast<std::size_t>(k)][0]) : -1;
      header = header || b[k] < 0;
    }
    if (header) {
      if (lineno == 1) continue;
      throw std::invalid_argument("stack scores line " + std::to_string(lineno) + ": invalid base");
    }
    try {
      m.set(b[0], b[1], b[2], b[3], std::stod(cells[4]));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("stack scores line " + std::to_string(lineno) + ": invalid score");
    }
  }
  return m;
}

double stacking_score(const RnaSequence& s, const Folding& f, const StackScores& m) {
  std::set<std::pair<int, int>> in(f.pairs.begin(), f.pairs.end());
  double total = 0.0;
  for (const auto& [i, j] : f.pairs)
    if (in.count({i - 1, j + 1}))
      total += m(s.bases[static_cast<std::size_t>(i - 1)], s.bases[static_cast<std::size_t>(j - 1)],
                 s.bases[static_cast<std::size_t>(i - 2)], s.bases[static_cast<std::size_t>(j)]);
  return total;
}

double fold_objective(const RnaSequence& s, const Folding& f, double rho, const StackScores& m) {
  return rho * static_cast<double>(f.size()) + (1.0 - rho) * stacking_score(s, f, m);
}

// Interval DP over 0-based [a, b]. W holds the best score of an interval with
// no enclosing pair; X the best when (a-1, b+1) is paired, in which case a
// pair (a, b) earns stacking credit. Intervals are decomposed on their left
// end so that reconstruction can pick the lexicographically smallest pair
// set among co-optimal ones.
FoldResult fold(const RnaSequence& s, double rho, const StackScores& m) {
  check_rho(rho);
  const int n = static_cast<int>(s.size());
  if (n == 0) throw std::invalid_argument("fold: empty sequence");
  const auto N = static_cast<std::size_t>(n);
  std::vector<Score> W(N * N), X(N * N);
  auto at = [&](std::vector<Score>& t, int a, int b) -> Score {
    if (a > b) return {};
    return t[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)];
  };
  auto credit = [&](int a, int b) {
    if (a < 1 || b > n - 2) return 0.0;
    const auto& B = s.bases;
    return (1.0 - rho) * m(B[static_cast<std::size_t>(a)], B[static_cast<std::size_t>(b)],
                           B[static_cast<std::size_t>(a - 1)], B[static_cast<std::size_t>(b + 1)]);
  };
  // Score of pairing a with k inside [a, b].
  auto pair_option = [&](int a, int k, int b, bool enclosed) {
    const Score in = at(X, a + 1, k - 1);
    const Score out = at(W, k + 1, b);
    Score sc{rho + in.v + out.v, 1 + in.c + out.c};
    if (enclosed && k == b) sc.v += credit(a, b);
    return sc;
  };

  for (int len = 1; len <= n; ++len) {
    for (int a = 0; a + len - 1 < n; ++a) {
      const int b = a + len - 1;
      for (int ctx = 0; ctx < 2; ++ctx) {
        Score best = at(W, a + 1, b);
        for (int k = a + 2; k <= b; ++k) {
          const Score sc = pair_option(a, k, b, ctx == 1);
          if (score_better(sc, best)) best = sc;
        }
        (ctx == 0 ? W : X)[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)] = best;
      }
    }
  }

  std::vector<std::pair<int, int>> pairs;
  struct Frame {
    int a, b;
    bool enclosed;
  };
  std::vector<Frame> stack{{0, n - 1, false}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.a > f.b) continue;
    const Score target = at(f.enclosed ? X : W, f.a, f.b);
    bool done = false;
    for (int k = f.a + 2; k <= f.b && !done; ++k) {
      if (score_ties(pair_option(f.a, k, f.b, f.enclosed), target)) {
        pairs.emplace_back(f.a + 1, k + 1);
        stack.push_back({k + 1, f.b, false});
        stack.push_back({f.a + 1, k - 1, true});
        done = true;
      }
    }
    if (!done) stack.push_back({f.a + 1, f.b, false});
  }
  FoldResult r;
  r.folding = make_folding(std::move(pairs), n);
  r.objective = fold_objective(s, r.folding, rho, m);
  return r;
}

std::vector<SizeStack> max_stack_by_size(const RnaSequence& s, const StackScores& m) {
  const int n = static_cast<int>(s.size());
  if (n == 0) throw std::invalid_argument("max_stack_by_size: empty sequence");
  const auto N = static_cast<std::size_t>(n);
  const std::size_t K = N / 2 + 1;
  const double neg = -kInf;
  using Row = std::vector<double>;
  std::vector<Row> W(N * N, Row(K, neg)), X(N * N, Row(K, neg));
  Row empty(K, neg);
  empty[0] = 0.0;
  auto at = [&](std::vector<Row>& t, int a, int b) -> const Row& {
    if (a > b) return empty;
    return t[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)];
  };
  for (int len = 1; len <= n; ++len) {
    for (int a = 0; a + len - 1 < n; ++a) {
      const int b = a + len - 1;
      for (int ctx = 0; ctx < 2; ++ctx) {
        Row best = at(W, a + 1, b);
        for (int k = a + 2; k <= b; ++k) {
          const Row& in = at(X, a + 1, k - 1);
          const Row& out = at(W, k + 1, b);
          double bonus = 0.0;
          if (ctx == 1 && k == b && a >= 1 && b <= n - 2)
            bonus = m(s.bases[static_cast<std::size_t>(a)], s.bases[static_cast<std::size_t>(b)],
                      s.bases[static_cast<std::size_t>(a - 1)], s.bases[static_cast<std::size_t>(b + 1)]);
          for (std::size_t p = 0; p < K; ++p) {
            if (in[p] == neg) continue;
            for (std::size_t q = 0; p + q + 1 < K; ++q) {
              if (out[q] == neg) continue;
              best[p + q + 1] = std::max(best[p + q + 1], in[p] + out[q] + bonus);
            }
          }
        }
        (ctx == 0 ? W : X)[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)] = std::move(best);
      }
    }
  }
  std::vector<SizeStack> out;
  const Row& top = at(W, 0, n - 1);
  for (std::size_t k = 0; k < K; ++k)
    if (top[k] != neg) out.push_back({static_cast<int>(k), top[k]});
  return out;
}

PiecewiseFunction1D rho_breakpoints(const RnaSequence& s, const StackScores& m) {
  std::vector<Line1D> lines;
  for (const auto& [k, st] : max_stack_by_size(s, m)) lines.push_back({k - st, st, k});
  return upper_envelope(lines, 0.0, 1.0);
}

double pair_utility(const Folding& candidate, const Folding& truth) {
  if (truth.pairs.empty()) return 1.0;
  std::set<std::pair<int, int>> c(candidate.pairs.begin(), candidate.pairs.end());
  std::size_t shared = 0;
  for (const auto& p : truth.pairs) shared += c.count(p);
  return static_cast<double>(shared) / static_cast<double>(truth.pairs.size());
}

PiecewiseFunction1D rna_utility_breakpoints(const RnaSequence& s, const StackScores& m, const Folding& truth) {
  const auto env = rho_breakpoints(s, m);
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < env.size(); ++i)
    pieces.push_back({0.0, pair_utility(fold(s, env.piece_probe(i), m).folding, truth), 0});
  return merge_equal_values(PiecewiseFunction1D(0.0, 1.0, env.breakpoints(), std::move(pieces)));
}

nlohmann::json to_json(const Folding& f) {
  auto pairs = nlohmann::json::array();
  for (const auto& [i, j] : f.pairs) pairs.push_back({i, j});
  return {{"pairs", pairs}};
}

Folding folding_from_json(const nlohmann::json& j, int n) {
  try {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& p : j.at("pairs")) pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return make_folding(std::move(pairs), n);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("folding JSON: ") + e.what());
  }
}

}  // namespace algotune
