#include "algotune/seqalign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "algotune/parametric.hpp"

namespace algotune {

namespace {

constexpr double kNegInf = -kInf;

// a beats b by more than rounding noise.
bool strictly_better(double a, double b) {
  if (b == kNegInf) return a > kNegInf;
  if (a == kNegInf) return false;
  return a > b + 1e-12 * std::max(1.0, std::fabs(b));
}

void check_sequence(const Sequence& s, const char* what) {
  if (s.chars.empty()) throw std::invalid_argument(std::string(what) + ": empty sequence");
  for (const auto& c : s.chars)
    if (c == kGap || c.empty())
      throw std::invalid_argument(std::string(what) + ": sequence contains the gap symbol");
}

std::int64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::int64_t>(h >> 1);
}

}  // namespace

Sequence make_sequence(const std::string& letters, std::string id) {
  Sequence s;
  s.id = std::move(id);
  for (char c : letters) s.chars.emplace_back(1, c);
  return s;
}

Alignment make_alignment(const std::vector<std::string>& rows) {
  Alignment a;
  for (const auto& r : rows) a.rows.push_back(make_sequence(r).chars);
  validate_alignment(a);
  return a;
}

std::vector<std::string> ungapped(const std::vector<std::string>& row) {
  std::vector<std::string> out;
  for (const auto& c : row)
    if (c != kGap) out.push_back(c);
  return out;
}

void validate_alignment(const Alignment& a) {
  if (a.rows.empty()) throw std::invalid_argument("alignment: no rows");
  const std::size_t L = a.rows[0].size();
  for (const auto& r : a.rows)
    if (r.size() != L) throw std::invalid_argument("alignment: rows differ in length");
  for (std::size_t c = 0; c < L; ++c) {
    bool any = false;
    for (const auto& r : a.rows) any = any || r[c] != kGap;
    if (!any) throw std::invalid_argument("alignment: all-gap column");
  }
}

AlignmentFeatures alignment_features(const Alignment& a) {
  if (a.rows.size() != 2) throw std::invalid_argument("alignment_features: pairwise alignment expected");
  AlignmentFeatures f;
  const auto& r1 = a.rows[0];
  const auto& r2 = a.rows[1];
  bool in1 = false, in2 = false;
  for (std::size_t c = 0; c < r1.size(); ++c) {
    const bool g1 = r1[c] == kGap;
    const bool g2 = r2[c] == kGap;
    if (!g1 && !g2) {
      if (r1[c] == r2[c]) ++f.matches;
      else ++f.mismatches;
    } else {
      ++f.indels;
    }
    if (g1 && !in1) ++f.gaps;
    if (g2 && !in2) ++f.gaps;
    in1 = g1;
    in2 = g2;
  }
  return f;
}

double affine_objective(const AlignmentFeatures& f, const AffineParams& p) {
  return static_cast<double>(f.matches) - p.rho1 * static_cast<double>(f.mismatches) -
         p.rho2 * static_cast<double>(f.indels) - p.rho3 * static_cast<double>(f.gaps);
}

AlignResult affine_align(const Sequence& s1, const Sequence& s2, const AffineParams& p,
                         std::size_t max_length) {
  check_sequence(s1, "affine_align");
  check_sequence(s2, "affine_align");
  if (s1.size() > max_length || s2.size() > max_length)
    throw std::invalid_argument("affine_align: sequence longer than configured maximum");
  for (double r : {p.rho1, p.rho2, p.rho3})
    if (!std::isfinite(r) || r < 0) throw std::invalid_argument("affine_align: parameters must be finite and >= 0");

  std::unordered_map<std::string, int> ids;
  auto intern = [&](const Sequence& s) {
    std::vector<int> v;
    v.reserve(s.size());
    for (const auto& c : s.chars) v.push_back(ids.emplace(c, static_cast<int>(ids.size())).first->second);
    return v;
  };
  const std::vector<int> a = intern(s1);
  const std::vector<int> b = intern(s2);
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  // States: 0 = diagonal, 1 = s1 symbol over a gap, 2 = gap over s2 symbol.
  // Each trace byte packs the predecessor state of all three (2 bits each).
  std::vector<std::uint8_t> trace((n + 1) * (m + 1), 0);
  std::vector<double> pm(m + 1, kNegInf), px(m + 1, kNegInf), py(m + 1, kNegInf);
  std::vector<double> cm(m + 1), cx(m + 1), cy(m + 1);
  const double ext = -p.rho2;
  const double open = -p.rho2 - p.rho3;

  auto pick = [](double v0, double v1, double v2, int& which) {
    which = 0;
    double best = v0;
    if (strictly_better(v1, best)) { best = v1; which = 1; }
    if (strictly_better(v2, best)) { best = v2; which = 2; }
    return best;
  };

  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      std::uint8_t t = 0;
      int w;
      if (i == 0 && j == 0) {
        cm[0] = 0.0;
        cx[0] = kNegInf;
        cy[0] = kNegInf;
        trace[0] = 0;
        continue;
      }
      // Diagonal.
      if (i > 0 && j > 0) {
        const double s = a[i - 1] == b[j - 1] ? 1.0 : -p.rho1;
        cm[j] = pick(pm[j - 1], px[j - 1], py[j - 1], w) + s;
        t |= static_cast<std::uint8_t>(w);
      } else {
        cm[j] = kNegInf;
      }
      // s1 symbol over a gap: comes from row i-1, same column.
      if (i > 0) {
        cx[j] = pick(pm[j] + open, px[j] + ext, py[j] + open, w);
        t |= static_cast<std::uint8_t>(w << 2);
      } else {
        cx[j] = kNegInf;
      }
      // Gap over s2 symbol: comes from the same row, column j-1.
      if (j > 0) {
        cy[j] = pick(cm[j - 1] + open, cx[j - 1] + open, cy[j - 1] + ext, w);
        t |= static_cast<std::uint8_t>(w << 4);
      } else {
        cy[j] = kNegInf;
      }
      trace[i * (m + 1) + j] = t;
    }
    std::swap(pm, cm);
    std::swap(px, cx);
    std::swap(py, cy);
  }

  int state;
  pick(pm[m], px[m], py[m], state);

  std::vector<std::string> r1, r2;
  std::string ops;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::uint8_t t = trace[i * (m + 1) + j];
    if (state == 0) {
      r1.push_back(s1.chars[i - 1]);
      r2.push_back(s2.chars[j - 1]);
      ops.push_back('D');
      state = t & 3;
      --i;
      --j;
    } else if (state == 1) {
      r1.push_back(s1.chars[i - 1]);
      r2.push_back(kGap);
      ops.push_back('X');
      state = (t >> 2) & 3;
      --i;
    } else {
      r1.push_back(kGap);
      r2.push_back(s2.chars[j - 1]);
      ops.push_back('Y');
      state = (t >> 4) & 3;
      --j;
    }
  }
  std::reverse(r1.begin(), r1.end());
  std::reverse(r2.begin(), r2.end());
  std::reverse(ops.begin(), ops.end());

  AlignResult res;
  res.alignment.rows = {std::move(r1), std::move(r2)};
  res.features = alignment_features(res.alignment);
  res.objective = affine_objective(res.features, p);
  res.tag = fnv1a(ops);
  return res;
}

std::vector<Alignment> enumerate_alignments(const Sequence& s1, const Sequence& s2) {
  check_sequence(s1, "enumerate_alignments");
  check_sequence(s2, "enumerate_alignments");
  if (s1.size() > 6 || s2.size() > 6) throw std::invalid_argument("oracle scale only");
  std::vector<Alignment> out;
  std::vector<std::string> r1, r2;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
    if (i == s1.size() && j == s2.size()) {
      out.push_back(Alignment{{r1, r2}});
      return;
    }
    if (i < s1.size() && j < s2.size()) {
      r1.push_back(s1.chars[i]);
      r2.push_back(s2.chars[j]);
      rec(i + 1, j + 1);
      r1.pop_back();
      r2.pop_back();
    }
    if (i < s1.size()) {
      r1.push_back(s1.chars[i]);
      r2.push_back(kGap);
      rec(i + 1, j);
      r1.pop_back();
      r2.pop_back();
    }
    if (j < s2.size()) {
      r1.push_back(kGap);
      r2.push_back(s2.chars[j]);
      rec(i, j + 1);
      r1.pop_back();
      r2.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

namespace {

std::set<std::pair<std::size_t, std::size_t>> aligned_pairs(const Alignment& a) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t p1 = 0, p2 = 0;
  for (std::size_t c = 0; c < a.columns(); ++c) {
    const bool g1 = a.rows[0][c] == kGap;
    const bool g2 = a.rows[1][c] == kGap;
    if (!g1 && !g2) pairs.emplace(p1, p2);
    if (!g1) ++p1;
    if (!g2) ++p2;
  }
  return pairs;
}

}  // namespace

double q_score(const Alignment& candidate, const Alignment& reference) {
  if (candidate.rows.size() != 2 || reference.rows.size() != 2)
    throw std::invalid_argument("q_score: pairwise alignments expected");
  validate_alignment(candidate);
  validate_alignment(reference);
  for (std::size_t r = 0; r < 2; ++r)
    if (ungapped(candidate.rows[r]) != ungapped(reference.rows[r]))
      throw std::invalid_argument("q_score: alignments of different sequences");
  const auto ref = aligned_pairs(reference);
  if (ref.empty()) return 1.0;
  const auto cand = aligned_pairs(candidate);
  std::size_t shared = 0;
  for (const auto& pr : ref) shared += cand.count(pr);
  return static_cast<double>(shared) / static_cast<double>(ref.size());
}

Sequence consensus(const Alignment& a) {
  if (a.rows.empty()) throw std::invalid_argument("consensus: no rows");
  for (const auto& r : a.rows)
    if (r.size() != a.rows[0].size()) throw std::invalid_argument("consensus: rows differ in length");
  Sequence s;
  s.id = "consensus";
  for (std::size_t c = 0; c < a.columns(); ++c) {
    std::map<std::string, int> counts;
    for (const auto& r : a.rows)
      if (r[c] != kGap) ++counts[r[c]];
    const std::string* best = nullptr;
    int best_count = 0;
    for (const auto& [sym, cnt] : counts)
      if (cnt > best_count) {
        best = &sym;
        best_count = cnt;
      }
    if (best) s.chars.push_back(*best);
  }
  return s;
}

GuideTree parse_newick(const std::string& text, const std::vector<Sequence>& seqs) {
  GuideTree tree;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto resolve = [&](const std::string& label) {
    for (std::size_t i = 0; i < seqs.size(); ++i)
      if (seqs[i].id == label) return static_cast<int>(i);
    try {
      std::size_t used = 0;
      const int idx = std::stoi(label, &used);
      if (used == label.size() && idx >= 1 && idx <= static_cast<int>(seqs.size())) return idx - 1;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("newick: unknown leaf label '" + label + "'");
  };
  std::function<int()> node = [&]() -> int {
    skip_ws();
    if (pos >= text.size()) throw std::invalid_argument("newick: unexpected end");
    if (text[pos] == '(') {
      ++pos;
      const int l = node();
      skip_ws();
      if (pos >= text.size() || text[pos] != ',') throw std::invalid_argument("newick: expected ','");
      ++pos;
      const int r = node();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')')
        throw std::invalid_argument("newick: expected ')' (only binary trees are supported)");
      ++pos;
      tree.nodes.push_back({l, r, -1});
      return static_cast<int>(tree.nodes.size()) - 1;
    }
    std::string label;
    while (pos < text.size() && text[pos] != ',' && text[pos] != ')' && text[pos] != ';' &&
           !std::isspace(static_cast<unsigned char>(text[pos])))
      label.push_back(text[pos++]);
    if (label.empty()) throw std::invalid_argument("newick: empty leaf label");
    tree.nodes.push_back({-1, -1, resolve(label)});
    return static_cast<int>(tree.nodes.size()) - 1;
  };
  tree.root = node();
  skip_ws();
  if (pos < text.size() && text[pos] == ';') ++pos;
  skip_ws();
  if (pos != text.size()) throw std::invalid_argument("newick: trailing characters");
  return tree;
}

ProgressiveTrace progressive_align_trace(const std::vector<Sequence>& seqs, const GuideTree& tree,
                                         const AffineParams& p) {
  if (seqs.empty()) throw std::invalid_argument("progressive_align: no sequences");
  std::vector<int> seen(seqs.size(), 0);
  for (const auto& nd : tree.nodes) {
    if (nd.leaf >= 0) {
      if (nd.leaf >= static_cast<int>(seqs.size()))
        throw std::invalid_argument("progressive_align: leaf index out of range");
      ++seen[static_cast<std::size_t>(nd.leaf)];
    } else if (nd.left < 0 || nd.right < 0) {
      throw std::invalid_argument("progressive_align: internal node without two children");
    }
  }
  for (int c : seen)
    if (c != 1) throw std::invalid_argument("progressive_align: leaves do not match sequences");

  const std::size_t nn = tree.nodes.size();
  std::vector<Sequence> cons(nn);
  std::vector<Alignment> local(nn);
  std::function<void(int)> up = [&](int v) {
    const auto& nd = tree.nodes[static_cast<std::size_t>(v)];
    if (nd.leaf >= 0) {
      cons[static_cast<std::size_t>(v)] = seqs[static_cast<std::size_t>(nd.leaf)];
      return;
    }
    up(nd.left);
    up(nd.right);
    local[static_cast<std::size_t>(v)] =
        affine_align(cons[static_cast<std::size_t>(nd.left)], cons[static_cast<std::size_t>(nd.right)], p)
            .alignment;
    cons[static_cast<std::size_t>(v)] = consensus(local[static_cast<std::size_t>(v)]);
  };
  up(tree.root);

  ProgressiveTrace out;
  out.node_rows.assign(nn, {});
  out.node_rows[static_cast<std::size_t>(tree.root)] = cons[static_cast<std::size_t>(tree.root)].chars;
  std::function<void(int)> down = [&](int v) {
    const auto& nd = tree.nodes[static_cast<std::size_t>(v)];
    if (nd.leaf >= 0) return;
    const auto& sigma = out.node_rows[static_cast<std::size_t>(v)];
    const auto& loc = local[static_cast<std::size_t>(v)];
    auto& left = out.node_rows[static_cast<std::size_t>(nd.left)];
    auto& right = out.node_rows[static_cast<std::size_t>(nd.right)];
    std::size_t k = 0;
    for (const auto& c : sigma) {
      if (c == kGap) {
        left.push_back(kGap);
        right.push_back(kGap);
      } else {
        left.push_back(loc.rows[0][k]);
        right.push_back(loc.rows[1][k]);
        ++k;
      }
    }
    down(nd.left);
    down(nd.right);
  };
  down(tree.root);

  out.msa.rows.resize(seqs.size());
  for (std::size_t v = 0; v < nn; ++v)
    if (tree.nodes[v].leaf >= 0) out.msa.rows[static_cast<std::size_t>(tree.nodes[v].leaf)] = out.node_rows[v];
  return out;
}

Alignment progressive_align(const std::vector<Sequence>& seqs, const GuideTree& tree, const AffineParams& p) {
  return progressive_align_trace(seqs, tree, p).msa;
}

namespace {

struct IndelSolution {
  long long mt = 0;
  long long id = 0;
  std::int64_t tag = 0;
  bool operator==(const IndelSolution& o) const { return mt == o.mt && id == o.id; }
};

}  // namespace

PiecewiseFunction1D indel_breakpoints(const Sequence& s1, const Sequence& s2, double rho_max,
                                      std::size_t max_length) {
  if (!(rho_max > 0) || !std::isfinite(rho_max))
    throw std::invalid_argument("indel_breakpoints: rho_max must be positive");
  if (s1.size() > max_length || s2.size() > max_length)
    throw std::invalid_argument("indel_breakpoints: sequence longer than configured maximum");
  auto solve = [&](double rho) {
    const auto r = affine_align(s1, s2, {0.0, rho, 0.0}, max_length);
    return IndelSolution{r.features.matches, r.features.indels, r.tag};
  };
  auto crossing = [](const IndelSolution& a, const IndelSolution& b, double, double) -> std::optional<double> {
    if (a.id == b.id) return std::nullopt;
    return static_cast<double>(a.mt - b.mt) / static_cast<double>(a.id - b.id);
  };
  const auto segs = parametric_partition<IndelSolution>(0.0, rho_max, solve, crossing);
  std::vector<double> bps;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i > 0) bps.push_back(segs[i].start);
    const auto& s = segs[i].solution;
    pieces.push_back(Piece{-static_cast<double>(s.id), static_cast<double>(s.mt), s.tag});
  }
  return PiecewiseFunction1D(0.0, rho_max, std::move(bps), std::move(pieces));
}

PiecewiseFunction1D utility_breakpoints(const Sequence& s1, const Sequence& s2, const Alignment& reference,
                                        double rho_max, std::size_t max_length) {
  const auto env = indel_breakpoints(s1, s2, rho_max, max_length);
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const auto r = affine_align(s1, s2, {0.0, env.piece_probe(i), 0.0}, max_length);
    pieces.push_back(Piece{0.0, q_score(r.alignment, reference), 0});
  }
  return merge_equal_values(PiecewiseFunction1D(0.0, rho_max, env.breakpoints(), std::move(pieces)));
}

namespace {

std::string sym(char c, int j) { return std::string(1, c) + std::to_string(j); }

struct Block {
  std::vector<std::string> s1, s2;
  std::vector<std::string> low1, low2;    // the l sub-alignment
  std::vector<std::string> high1, high2;  // the h sub-alignment
};

Block make_block(int j) {
  Block b;
  const auto a = sym('a', j), bb = sym('b', j), c = sym('c', j), d = sym('d', j);
  for (int r = 0; r < j; ++r) b.s1.push_back(a);
  b.s1.push_back(bb);
  b.s1.push_back(d);
  b.s2.push_back(bb);
  for (int r = 0; r < j; ++r) b.s2.push_back(c);
  b.s2.push_back(d);
  // Row 1 is a^j b -^j d in both sub-alignments.
  std::vector<std::string> row1;
  for (int r = 0; r < j; ++r) row1.push_back(a);
  row1.push_back(bb);
  for (int r = 0; r < j; ++r) row1.push_back(kGap);
  row1.push_back(d);
  b.low1 = b.high1 = row1;
  b.low2.push_back(bb);
  for (int r = 0; r < j; ++r) b.low2.push_back(kGap);
  for (int r = 0; r < j; ++r) b.low2.push_back(c);
  b.low2.push_back(d);
  for (int r = 0; r < j; ++r) b.high2.push_back(kGap);
  b.high2.push_back(bb);
  for (int r = 0; r < j; ++r) b.high2.push_back(c);
  b.high2.push_back(d);
  return b;
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// Concatenates blocks; use_high[m] selects the h sub-alignment for block m.
void add_pair(LbInstance& inst, const std::vector<int>& js, const std::vector<bool>& use_high, int index) {
  Sequence s1, s2;
  s1.id = "S1_" + std::to_string(index);
  s2.id = "S2_" + std::to_string(index);
  Alignment ref;
  ref.rows.resize(2);
  std::vector<double> th;
  for (std::size_t m = 0; m < js.size(); ++m) {
    const Block b = make_block(js[m]);
    append(s1.chars, b.s1);
    append(s2.chars, b.s2);
    append(ref.rows[0], use_high[m] ? b.high1 : b.low1);
    append(ref.rows[1], use_high[m] ? b.high2 : b.low2);
    th.push_back(1.0 / (2.0 * js[m]));
  }
  std::sort(th.begin(), th.end());
  inst.pairs.emplace_back(std::move(s1), std::move(s2));
  inst.references.push_back(std::move(ref));
  inst.thresholds.push_back(std::move(th));
}

}  // namespace

std::vector<double> LbInstance::candidate_params() const {
  std::vector<double> all;
  for (const auto& t : thresholds) all.insert(all.end(), t.begin(), t.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> out;
  if (all.empty()) return out;
  out.push_back(all.front() / 2.0);
  for (std::size_t i = 0; i + 1 < all.size(); ++i) out.push_back((all[i] + all[i + 1]) / 2.0);
  out.push_back(all.back() * 2.0);
  return out;
}

LbInstance gen_lb_sequences(int n) {
  if (n < 8) throw std::invalid_argument("gen_lb_sequences: n must be >= 8");
  const int e = static_cast<int>(std::floor(std::log2(std::sqrt(n / 2.0)) + 1e-12));
  LbInstance inst;
  inst.k = (1 << e) - 1;
  inst.N = e;
  for (int i = 1; i <= inst.N; ++i) {
    const int step = 1 << (i - 1);
    std::vector<int> js;
    for (int j = step; j <= inst.k + 1 - step; j += step) js.push_back(j);
    std::vector<bool> high(js.size());
    for (std::size_t m = 0; m < js.size(); ++m) high[m] = (m % 2) == 1;
    add_pair(inst, js, high, i);
  }
  return inst;
}

LbInstance sketch_lb_instance() {
  LbInstance inst;
  inst.k = 3;
  inst.N = 2;
  add_pair(inst, {1, 2, 3}, {false, true, false}, 1);
  add_pair(inst, {2}, {true}, 2);
  return inst;
}

std::vector<Sequence> read_fasta(std::istream& in) {
  std::vector<Sequence> out;
  std::string line;
  bool have = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '>') {
      out.push_back(Sequence{{}, line.substr(1)});
      have = true;
      continue;
    }
    if (!have) throw std::invalid_argument("FASTA: sequence data before the first '>' header");
    auto& chars = out.back().chars;
    if (line.find_first_of(" \t") != std::string::npos) {
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) chars.push_back(tok);
    } else {
      for (char c : line) chars.emplace_back(1, c);
    }
  }
  return out;
}

std::vector<Sequence> read_fasta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open FASTA file: " + path);
  return read_fasta(in);
}

void write_fasta(std::ostream& out, const Alignment& a, const std::vector<std::string>& ids) {
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    out << '>' << (r < ids.size() ? ids[r] : "seq" + std::to_string(r + 1)) << '\n';
    bool single = true;
    for (const auto& c : a.rows[r]) single = single && c.size() == 1;
    for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
      if (!single && c > 0) out << ' ';
      out << a.rows[r][c];
    }
    out << '\n';
  }
}

Alignment alignment_from_fasta(const std::vector<Sequence>& rows) {
  Alignment a;
  for (const auto& r : rows) a.rows.push_back(r.chars);
  validate_alignment(a);
  return a;
}

}  // namespace algotune
