#include "algotune/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "algotune/bounds.hpp"
#include "algotune/cluster.hpp"
#include "algotune/format.hpp"
#include "algotune/greedy.hpp"
#include "algotune/learn.hpp"
#include "algotune/mechanisms.hpp"
#include "algotune/rnafold.hpp"
#include "algotune/seqalign.hpp"
#include "algotune/tad.hpp"
#include "json.hpp"

namespace algotune {

namespace {

using ojson = nlohmann::ordered_json;

// What a command produces. CSV: a scalar prints bare; otherwise summary
// fields print as key=value lines, then the table (header + rows), or the
// text block. JSON: one object holding the same fields.
struct Output {
  std::optional<std::pair<std::string, ojson>> scalar;
  ojson summary = ojson::object();
  std::string table_name = "rows";
  std::vector<std::string> columns;
  std::vector<std::vector<ojson>> rows;
  std::optional<std::string> text;  // CSV-mode replacement for the table
  int exit_code = kExitOk;
};

ojson num(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return std::stod(format_number(x));
}

ojson num_list(const std::vector<double>& xs) {
  ojson a = ojson::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

std::string csv_cell(const ojson& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  return v.dump();
}

void render(const Output& o, bool json, std::ostream& os) {
  if (json) {
    ojson j = ojson::object();
    if (o.scalar) {
      j[o.scalar->first] = o.scalar->second;
    } else {
      j = o.summary;
      if (!o.columns.empty() || !o.rows.empty()) {
        ojson arr = ojson::array();
        for (const auto& r : o.rows) {
          ojson rec = ojson::object();
          for (std::size_t c = 0; c < o.columns.size(); ++c) rec[o.columns[c]] = r[c];
          arr.push_back(std::move(rec));
        }
        j[o.table_name] = std::move(arr);
      }
    }
    os << j.dump(2) << "\n";
    return;
  }
  if (o.scalar) {
    os << csv_cell(o.scalar->second) << "\n";
    return;
  }
  for (const auto& [k, v] : o.summary.items()) os << k << "=" << csv_cell(v) << "\n";
  if (o.text) {
    os << *o.text;
  } else if (!o.columns.empty()) {
    for (std::size_t c = 0; c < o.columns.size(); ++c) os << (c ? "," : "") << o.columns[c];
    os << "\n";
    for (const auto& r : o.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << csv_cell(r[c]);
      os << "\n";
    }
  }
}

Output pieces_output(const PiecewiseFunction1D& f) {
  Output o;
  o.summary["piece_count"] = f.size();
  o.table_name = "pieces";
  o.columns = {"start", "end", "slope", "intercept"};
  for (std::size_t i = 0; i < f.size(); ++i)
    o.rows.push_back({num(f.piece_start(i)), num(f.piece_end(i)), num(f.pieces()[i].slope),
                      num(f.pieces()[i].intercept)});
  return o;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file '" + path + "'");
  return in;
}

std::string slurp(const std::string& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || tok.find_first_not_of(" \t", used) != std::string::npos)
      throw std::invalid_argument("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// Literal Newick text, or a path to a file holding it.
std::string newick_text(const std::string& arg) {
  if (arg.find('(') != std::string::npos) return arg;
  return slurp(arg);
}

std::string joined(const Sequence& s) {
  std::string out;
  for (const auto& c : s.chars) out += c;
  return out;
}

std::string fasta_text(const Alignment& a, const std::vector<std::string>& ids) {
  std::ostringstream os;
  write_fasta(os, a, ids);
  return os.str();
}

std::string dot_bracket(const Folding& f, std::size_t n) {
  std::string s(n, '.');
  for (const auto& [i, j] : f.pairs) {
    s[static_cast<std::size_t>(i - 1)] = '(';
    s[static_cast<std::size_t>(j - 1)] = ')';
  }
  return s;
}

ojson interval_list(const TadSet& t) {
  ojson a = ojson::array();
  for (const auto& [i, j] : t.intervals) a.push_back(std::to_string(i) + "-" + std::to_string(j));
  return a;
}

ValuationProfile profile_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("values")) return ValuationProfile::dense(j.at("values").get<std::vector<std::vector<double>>>());
    std::vector<ValuationProfile::Entry> entries;
    for (const auto& e : j.at("entries"))
      entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    return ValuationProfile(j.at("n_agents").get<int>(), j.at("n_alternatives").get<int>(), std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("valuation profile: ") + e.what());
  }
}

ojson certificate_summary(const ShatteringCertificate& c) {
  ojson s = ojson::object();
  s["n"] = c.n;
  s["witnesses"] = num_list(c.witnesses);
  s["shattered"] = c.shattered;
  s["patterns_found"] = c.pattern_count();
  return s;
}

MergeFamily parse_family(const std::string& f) {
  if (f == "C1" || f == "c1") return MergeFamily::C1;
  if (f == "C2" || f == "c2") return MergeFamily::C2;
  if (f == "C3" || f == "c3") return MergeFamily::C3;
  throw std::invalid_argument("unknown merge family '" + f + "' (expected C1, C2 or C3)");
}

struct Globals {
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  double tolerance = 1e-9;
};

// ---- align / msa ----

struct AlignArgs {
  std::string input, reference, tree;
  double rho1 = 0, rho2 = 0, rho3 = 0, rho_max = 1;
  int n = 128;
};

std::pair<Sequence, Sequence> read_pair(const std::string& path) {
  const auto seqs = read_fasta_file(path);
  if (seqs.size() != 2) throw std::invalid_argument(path + ": expected exactly two sequences");
  return {seqs[0], seqs[1]};
}

Output align_run(const AlignArgs& a) {
  const auto [s1, s2] = read_pair(a.input);
  const auto r = affine_align(s1, s2, {a.rho1, a.rho2, a.rho3});
  Output o;
  o.summary["objective"] = num(r.objective);
  o.summary["matches"] = r.features.matches;
  o.summary["mismatches"] = r.features.mismatches;
  o.summary["indels"] = r.features.indels;
  o.summary["gaps"] = r.features.gaps;
  o.table_name = "alignment";
  o.columns = {"id", "row"};
  const std::string ids[] = {s1.id, s2.id};
  for (std::size_t i = 0; i < 2; ++i) {
    std::string row;
    for (const auto& c : r.alignment.rows[i]) row += c;
    o.rows.push_back({ids[i], row});
  }
  return o;
}

Output align_decompose(const AlignArgs& a) {
  const auto [s1, s2] = read_pair(a.input);
  if (a.reference.empty()) return pieces_output(indel_breakpoints(s1, s2, a.rho_max));
  const auto ref = alignment_from_fasta(read_fasta_file(a.reference));
  return pieces_output(utility_breakpoints(s1, s2, ref, a.rho_max));
}

Output align_lb_verify(const AlignArgs& a) {
  const auto inst = gen_lb_sequences(a.n);
  std::vector<Evaluator> fns;
  for (std::size_t i = 0; i < inst.pairs.size(); ++i)
    fns.push_back([&inst, i](std::span<const double> rho) {
      const auto r = affine_align(inst.pairs[i].first, inst.pairs[i].second, {0, rho[0], 0});
      return q_score(r.alignment, inst.references[i]);
    });
  const std::vector<double> z(inst.pairs.size(), 0.75);
  std::vector<std::vector<double>> cands;
  for (double x : inst.candidate_params()) cands.push_back({x});
  const auto cert = verify_shattering(fns, z, cands);

  std::size_t longest = 0;
  for (const auto& [x, y] : inst.pairs) longest = std::max({longest, x.size(), y.size()});

  Output o;
  o.summary = certificate_summary(cert);
  o.summary["k"] = inst.k;
  o.summary["pairs"] = inst.N;
  o.summary["longest"] = longest;
  o.exit_code = cert.shattered ? kExitOk : kExitVerificationFailed;
  return o;
}

Output msa_run(const AlignArgs& a) {
  const auto seqs = read_fasta_file(a.input);
  if (seqs.size() < 2) throw std::invalid_argument(a.input + ": need at least two sequences");
  const auto tree = parse_newick(newick_text(a.tree), seqs);
  const auto msa = progressive_align(seqs, tree, {a.rho1, a.rho2, a.rho3});
  std::vector<std::string> ids;
  for (const auto& s : seqs) ids.push_back(s.id);
  Output o;
  o.table_name = "alignment";
  o.columns = {"id", "row"};
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    std::string row;
    for (const auto& c : msa.rows[i]) row += c;
    o.rows.push_back({ids[i], row});
  }
  o.text = fasta_text(msa, ids);
  return o;
}

// ---- fold ----

struct FoldArgs {
  std::string seq, input, stack, truth;
  double rho = 0;
};

RnaSequence fold_sequence(const FoldArgs& a) {
  if (!a.seq.empty() == !a.input.empty()) throw std::invalid_argument("give exactly one of --seq or --input");
  if (!a.seq.empty()) return parse_rna(a.seq);
  const auto seqs = read_fasta_file(a.input);
  if (seqs.empty()) throw std::invalid_argument(a.input + ": no sequence");
  return parse_rna(joined(seqs[0]));
}

StackScores fold_scores(const FoldArgs& a) {
  if (a.stack.empty()) return StackScores::watson_crick();
  auto in = open_input(a.stack);
  return read_stack_scores(in);
}

Output fold_run(const FoldArgs& a) {
  const auto s = fold_sequence(a);
  const auto r = fold(s, a.rho, fold_scores(a));
  Output o;
  o.summary["n"] = s.size();
  o.summary["objective"] = num(r.objective);
  o.summary["structure"] = dot_bracket(r.folding, s.size());
  o.table_name = "pairs";
  o.columns = {"i", "j"};
  for (const auto& [i, j] : r.folding.pairs) o.rows.push_back({i, j});
  return o;
}

Output fold_decompose(const FoldArgs& a) {
  const auto s = fold_sequence(a);
  const auto m = fold_scores(a);
  PiecewiseFunction1D f = a.truth.empty()
                              ? rho_breakpoints(s, m)
                              : rna_utility_breakpoints(s, m, folding_from_json(read_json(a.truth), static_cast<int>(s.size())));
  Output o = pieces_output(f);
  const std::size_t bound = s.size() / 2 + 1;
  o.summary["n"] = s.size();
  o.summary["bound"] = bound;
  o.summary["within_bound"] = f.size() <= bound;
  if (f.size() > bound) o.exit_code = kExitVerificationFailed;
  return o;
}

// ---- tad ----

struct TadArgs {
  std::string matrix, truth;
  double rho = 1, rho_hi = 4;
  int min_length = 1;
};

TadWeights tad_weights(const TadArgs& a) {
  auto in = open_input(a.matrix);
  return precompute_cij(read_contact_matrix(in));
}

Output tad_run(const TadArgs& a) {
  const auto w = tad_weights(a);
  const auto r = tad_optimize(w, a.rho, a.min_length);
  Output o;
  o.summary["n"] = w.n();
  o.summary["objective"] = num(r.objective);
  o.summary["tads"] = r.tads.size();
  o.table_name = "intervals";
  o.columns = {"i", "j"};
  for (const auto& [i, j] : r.tads.intervals) o.rows.push_back({i, j});
  return o;
}

Output tad_decompose(const TadArgs& a, double tol) {
  const auto w = tad_weights(a);
  const auto d = rho_decomposition(w, a.rho_hi, tol, a.min_length);
  std::optional<PiecewiseFunction1D> util;
  if (!a.truth.empty()) util = tad_utility_breakpoints(d, tad_set_from_json(read_json(a.truth)));
  Output o;
  o.summary["n"] = w.n();
  o.summary["piece_count"] = d.partition.size();
  o.summary["root_cap_hit"] = d.root_cap_hit;
  o.table_name = "pieces";
  o.columns = {"start", "end", "tads", "intervals"};
  if (util) o.columns.push_back("utility");
  for (std::size_t i = 0; i < d.partition.size(); ++i) {
    const auto& set = d.sets[static_cast<std::size_t>(d.partition.pieces()[i].tag)];
    std::vector<ojson> row{num(d.partition.piece_start(i)), num(d.partition.piece_end(i)), set.size(),
                           interval_list(set)};
    if (util) row.push_back(num((*util)(d.partition.piece_probe(i))));
    o.rows.push_back(std::move(row));
  }
  return o;
}

// ---- greedy ----

struct GreedyArgs {
  std::string input;
  double capacity = 0, rho = 1, rho_max = 3;
  bool decompose = false;
};

Output greedy_knapsack(const GreedyArgs& a) {
  auto in = open_input(a.input);
  const auto inst = read_knapsack_csv(in, a.capacity);
  if (a.decompose) return pieces_output(knapsack_breakpoints(inst, a.rho_max));
  const auto r = knapsack_greedy(inst, a.rho);
  Output o;
  o.summary["total_value"] = num(r.total_value);
  o.summary["items"] = r.items.size();
  o.table_name = "items";
  o.columns = {"item", "value", "size"};
  for (int i : r.items)
    o.rows.push_back({i, num(inst.values[static_cast<std::size_t>(i)]), num(inst.sizes[static_cast<std::size_t>(i)])});
  return o;
}

Output greedy_mwis(const GreedyArgs& a) {
  auto in = open_input(a.input);
  const auto g = read_graph(in);
  if (a.decompose) return pieces_output(mwis_breakpoints(g, a.rho_max));
  const auto r = mwis_greedy(g, a.rho);
  Output o;
  o.summary["total_weight"] = num(r.total_weight);
  o.summary["vertices"] = r.vertices.size();
  o.table_name = "vertices";
  o.columns = {"vertex", "weight"};
  for (int v : r.vertices) o.rows.push_back({v, num(g.weight(v))});
  return o;
}

// ---- cluster ----

struct ClusterArgs {
  std::string input, family = "C2", labels;
  bool points = false;
  double rho = 1;
  int k = 2;
};

ClusterInstance cluster_instance(const ClusterArgs& a) {
  auto in = open_input(a.input);
  return read_cluster_instance(in, a.points);
}

Output cluster_run(const ClusterArgs& a) {
  const auto inst = cluster_instance(a);
  const auto tree = agglomerate(inst, parse_family(a.family), a.rho);
  const auto c = prune_tree(tree, a.k, inst);
  Output o;
  o.summary["n"] = inst.n();
  o.summary["k"] = a.k;
  o.summary["cost"] = num(c.cost);
  ojson merges = ojson::array();
  for (const auto& m : tree.merges) merges.push_back(std::to_string(m.left) + "+" + std::to_string(m.right));
  o.summary["merges"] = merges;
  std::vector<int> label(static_cast<std::size_t>(inst.n()), -1);
  for (std::size_t c_i = 0; c_i < c.clusters.size(); ++c_i)
    for (int p : c.clusters[c_i]) label[static_cast<std::size_t>(p)] = static_cast<int>(c_i);
  o.table_name = "assignment";
  o.columns = {"point", "cluster"};
  for (std::size_t p = 0; p < label.size(); ++p) o.rows.push_back({p, label[p]});
  return o;
}

Output cluster_decompose(const ClusterArgs& a) {
  const auto inst = cluster_instance(a);
  if (a.labels.empty()) throw std::invalid_argument("cluster decompose needs --labels");
  const std::string text = a.labels.find(',') != std::string::npos ? a.labels : slurp(a.labels);
  std::string flat = text;
  std::replace_if(flat.begin(), flat.end(), [](char ch) { return ch == '\n' || ch == '\r'; }, ',');
  while (!flat.empty() && flat.back() == ',') flat.pop_back();
  std::vector<int> labels;
  for (double x : parse_list(flat)) {
    if (x != std::floor(x) || x < 0) throw std::invalid_argument("labels must be nonnegative integers");
    labels.push_back(static_cast<int>(x));
  }
  const auto d = c2_decomposition(inst, pair_agreement_utility(inst, labels, a.k));
  Output o;
  o.summary["n"] = inst.n();
  o.summary["piece_count"] = d.partition.size();
  o.summary["trees"] = d.trees.size();
  o.table_name = "pieces";
  o.columns = {"start", "end", "utility", "tree"};
  for (std::size_t i = 0; i < d.partition.size(); ++i)
    o.rows.push_back({num(d.partition.piece_start(i)), num(d.partition.piece_end(i)),
                      num(d.partition.pieces()[i].intercept), d.partition.pieces()[i].tag});
  return o;
}

// ---- mech ----

struct MechArgs {
  std::string profile, weights, bids, reserves = "0";
  bool dual = false;
  double hi = 1, epsilon = 0.25;
  int n = 6;
};

Output mech_nam(const MechArgs& a) {
  if (a.profile.empty() || a.weights.empty()) throw std::invalid_argument("mech nam needs --profile and --weights");
  const auto v = profile_from_json(read_json(a.profile));
  const NamParams p{parse_list(a.weights)};
  const int j = nam_outcome(v, p);
  const auto pay = nam_payments(v, p);
  double total = 0;
  for (double x : pay) total += x;
  Output o;
  o.summary["mechanism"] = "nam";
  o.summary["outcome"] = j;
  o.summary["welfare"] = num(nam_welfare(v, p));
  o.summary["payment_sum"] = num(total);
  o.table_name = "agents";
  o.columns = {"agent", "weight", "value", "payment"};
  for (int i = 0; i < v.n_agents(); ++i)
    o.rows.push_back({i, num(p.weights[static_cast<std::size_t>(i)]), num(v.value(i, j)), num(pay[static_cast<std::size_t>(i)])});
  return o;
}

Output mech_spa(const MechArgs& a) {
  if (a.bids.empty() == a.profile.empty()) throw std::invalid_argument("give exactly one of --bids or --profile");
  std::vector<double> bids;
  if (!a.bids.empty()) {
    bids = parse_list(a.bids);
  } else {
    const auto v = profile_from_json(read_json(a.profile));
    for (int i = 0; i < v.n_agents(); ++i) bids.push_back(v.value(i, 0));
  }
  if (a.dual) return pieces_output(anonymous_reserve_dual(bids, a.hi));
  const ReserveVector r{parse_list(a.reserves)};
  if (!r.anonymous() && r.values.size() != bids.size())
    throw std::invalid_argument("--reserves needs one value or one per bidder");
  Output o;
  o.summary["mechanism"] = "spa";
  o.summary["reserves"] = num_list(r.values);
  o.summary["revenue"] = num(spa_revenue(bids, r));
  return o;
}

Output mech_nam_lb_verify(const MechArgs& a) {
  const auto inst = nam_shatter_instances(a.n, a.epsilon);
  const auto cert = verify_nam_shattering(inst);
  Output o;
  o.summary = certificate_summary(cert);
  o.summary["epsilon"] = num(a.epsilon);
  o.exit_code = cert.shattered ? kExitOk : kExitVerificationFailed;
  return o;
}

// ---- learn ----

Output learn_run(const std::string& config, std::optional<std::uint64_t> seed, int threads, bool json) {
  auto cfg = experiment_config_from_json(read_json(config));
  if (seed) cfg.seed = *seed;
  if (threads > 0) cfg.threads = threads;
  const auto r = run_experiment(cfg);
  Output o;
  if (!json) {
    o.text = experiment_csv(r);
    return o;
  }
  o.summary["family"] = cfg.family;
  o.summary["seed"] = cfg.seed;
  o.table_name = "rows";
  o.columns = {"N", "mean_error", "std_error", "bound"};
  if (r.adversarial) o.columns.push_back("max_error");
  for (const auto& row : r.rows) {
    std::vector<ojson> rec{row.N, num(row.mean_error), num(row.std_error), num(row.bound)};
    if (r.adversarial) rec.push_back(num(row.max_error));
    o.rows.push_back(std::move(rec));
  }
  return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-driven algorithm configuration toolkit", "algotune"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", g.out, "Write results to this file instead of stdout");
  app.add_option("--tolerance", g.tolerance, "Breakpoint search tolerance")->capture_default_str();

  std::function<Output()> action;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, std::function<Output()> f) {
    auto* sc = parent->add_subcommand(name, help);
    sc->callback([&action, f] { action = f; });
    return sc;
  };

  // align / msa
  AlignArgs al;
  auto* align = app.add_subcommand("align", "Pairwise sequence alignment")->require_subcommand(1);
  auto* ar = leaf(align, "run", "Align two sequences", [&] { return align_run(al); });
  ar->add_option("--input", al.input, "FASTA file with two sequences")->required();
  ar->add_option("--rho1", al.rho1, "Mismatch weight");
  ar->add_option("--rho2", al.rho2, "Indel weight");
  ar->add_option("--rho3", al.rho3, "Gap-open weight");
  auto* ad = leaf(align, "decompose", "Objective or utility as a function of the indel weight",
                  [&] { return align_decompose(al); });
  ad->add_option("--input", al.input, "FASTA file with two sequences")->required();
  ad->add_option("--reference", al.reference, "Reference alignment (FASTA with gaps)");
  ad->add_option("--rho-max", al.rho_max, "Upper end of the parameter range")->capture_default_str();
  auto* alb = leaf(align, "lb-verify", "Check the shattering construction for the indel weight",
                   [&] { return align_lb_verify(al); });
  alb->add_option("--n", al.n, "Alphabet-size budget")->capture_default_str();

  auto* msa = app.add_subcommand("msa", "Progressive multiple alignment")->require_subcommand(1);
  auto* mr = leaf(msa, "run", "Align along a guide tree", [&] { return msa_run(al); });
  mr->add_option("--input", al.input, "FASTA file")->required();
  mr->add_option("--tree", al.tree, "Newick guide tree, literal or file")->required();
  mr->add_option("--rho1", al.rho1, "Mismatch weight");
  mr->add_option("--rho2", al.rho2, "Indel weight");
  mr->add_option("--rho3", al.rho3, "Gap-open weight");

  // fold
  FoldArgs fa;
  auto* foldc = app.add_subcommand("fold", "RNA folding")->require_subcommand(1);
  auto* fr = leaf(foldc, "run", "Fold at one parameter value", [&] { return fold_run(fa); });
  auto* fd = leaf(foldc, "decompose", "Breakpoints over the pair weight", [&] { return fold_decompose(fa); });
  for (auto* sc : {fr, fd}) {
    sc->add_option("--seq", fa.seq, "Sequence over A, C, G, U");
    sc->add_option("--input", fa.input, "FASTA file (first record is used)");
    sc->add_option("--stack", fa.stack, "Stacking scores CSV b1,b2,b3,b4,score");
  }
  fr->add_option("--rho", fa.rho, "Pair weight")->capture_default_str();
  fd->add_option("--truth", fa.truth, "Reference folding JSON; reports pair utility instead of the objective");

  // tad
  TadArgs ta;
  auto* tad = app.add_subcommand("tad", "Domain calling on contact matrices")->require_subcommand(1);
  auto* tr = leaf(tad, "run", "Optimal domain set at one parameter value", [&] { return tad_run(ta); });
  auto* td = leaf(tad, "decompose", "Domain sets over the scaling exponent", [&] { return tad_decompose(ta, g.tolerance); });
  for (auto* sc : {tr, td}) {
    sc->add_option("--matrix", ta.matrix, "Dense contact matrix CSV")->required();
    sc->add_option("--min-length", ta.min_length, "Smallest domain length")->capture_default_str();
  }
  tr->add_option("--rho", ta.rho, "Scaling exponent")->capture_default_str();
  td->add_option("--rho-hi", ta.rho_hi, "Upper end of the parameter range")->capture_default_str();
  td->add_option("--truth", ta.truth, "Reference domain set JSON");

  // greedy
  GreedyArgs ga;
  auto* greedy = app.add_subcommand("greedy", "Parameterized greedy heuristics")->require_subcommand(1);
  auto* gk = leaf(greedy, "knapsack", "Greedy knapsack", [&] { return greedy_knapsack(ga); });
  gk->add_option("--input", ga.input, "CSV of value,size rows")->required();
  gk->add_option("--capacity", ga.capacity, "Knapsack capacity")->required();
  auto* gm = leaf(greedy, "mwis", "Greedy maximum-weight independent set", [&] { return greedy_mwis(ga); });
  gm->add_option("--input", ga.input, "Edge list with 'w v weight' lines")->required();
  for (auto* sc : {gk, gm}) {
    sc->add_option("--rho", ga.rho, "Score exponent")->capture_default_str();
    sc->add_flag("--decompose", ga.decompose, "Print the value as a function of rho");
    sc->add_option("--rho-max", ga.rho_max, "Upper end of the parameter range")->capture_default_str();
  }

  // cluster
  ClusterArgs ca;
  auto* cl = app.add_subcommand("cluster", "Agglomerative clustering")->require_subcommand(1);
  auto* cr = leaf(cl, "run", "Build a tree and prune it to k clusters", [&] { return cluster_run(ca); });
  auto* cd = leaf(cl, "decompose", "Utility over the interpolation parameter", [&] { return cluster_decompose(ca); });
  for (auto* sc : {cr, cd}) {
    sc->add_option("--input", ca.input, "Distance matrix or point list CSV")->required();
    sc->add_flag("--points", ca.points, "Input rows are points; use Euclidean distances");
    sc->add_option("--k", ca.k, "Number of clusters")->capture_default_str();
  }
  cr->add_option("--family", ca.family, "Merge family C1, C2 or C3")->capture_default_str();
  cr->add_option("--rho", ca.rho, "Family parameter")->capture_default_str();
  cd->add_option("--labels", ca.labels, "Ground-truth labels, comma list or file");

  // mech
  MechArgs ma;
  auto* mech = app.add_subcommand("mech", "Mechanisms")->require_subcommand(1);
  auto* mn = leaf(mech, "nam", "Neutral affine maximizer", [&] { return mech_nam(ma); });
  mn->add_option("--profile", ma.profile, "Valuation profile JSON");
  mn->add_option("--weights", ma.weights, "Comma-separated agent weights");
  auto* ms = leaf(mech, "spa", "Second-price auction with reserves", [&] { return mech_spa(ma); });
  ms->add_option("--bids", ma.bids, "Comma-separated bids");
  ms->add_option("--profile", ma.profile, "Valuation profile JSON (alternative 0 holds the bids)");
  ms->add_option("--reserves", ma.reserves, "One anonymous reserve or one per bidder")->capture_default_str();
  ms->add_flag("--dual", ma.dual, "Print revenue as a function of an anonymous reserve");
  ms->add_option("--hi", ma.hi, "Upper end of the reserve range for --dual")->capture_default_str();
  auto* mv = leaf(mech, "nam-lb-verify", "Check the shattering construction for affine maximizers",
                  [&] { return mech_nam_lb_verify(ma); });
  mv->add_option("--n", ma.n, "Number of agents (even)")->capture_default_str();
  mv->add_option("--epsilon", ma.epsilon, "Construction epsilon in (0, 1/2)")->capture_default_str();

  // learn
  std::string config;
  int threads = 0;
  auto* learn = app.add_subcommand("learn", "Sample-complexity experiments")->require_subcommand(1);
  auto* lr = leaf(learn, "run", "Run an experiment from a JSON config", [&] {
    std::optional<std::uint64_t> s;
    if (seed_opt->count() > 0) s = g.seed;
    return learn_run(config, s, threads, g.format == "json");
  });
  lr->add_option("--config", config, "Experiment config JSON")->required();
  lr->add_option("--threads", threads, "Worker threads (overrides the config)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Sample-complexity calculators")->require_subcommand(1);
  long long vc = 0, pd = 0, kb = 1, B = 1, N = 1, n_fns = 1;
  double delta = 0.01, la = 1, lb = 1;
  auto scalar = [](const std::string& name, ojson v) {
    Output o;
    o.scalar = {name, std::move(v)};
    return o;
  };
  auto* bp = leaf(bounds, "pdim", "Pseudo-dimension from boundary counting",
                  [&] { return scalar("pdim", pdim_from_counting(vc, pd, kb)); });
  bp->add_option("--vc", vc, "VC dimension of the boundary class")->required();
  bp->add_option("--pdim", pd, "Pseudo-dimension of the piece class")->required();
  bp->add_option("--k", kb, "Number of boundary functions")->required();
  auto* bo = leaf(bounds, "oscillation", "Pseudo-dimension from an oscillation count",
                  [&] { return scalar("pdim", pdim_from_oscillations(B)); });
  bo->add_option("--B", B, "Oscillation bound")->required();
  auto* bs = leaf(bounds, "spa", "Estimation bound for anonymous reserves",
                  [&] { return scalar("bound", num(spa_estimation_bound(N, delta))); });
  bs->add_option("--N", N, "Sample size")->required();
  bs->add_option("--delta", delta, "Failure probability")->capture_default_str();
  auto* bf = leaf(bounds, "finite", "Union bound over a finite class",
                  [&] { return scalar("bound", num(finite_class_bound(n_fns, N, delta))); });
  bf->add_option("--n", n_fns, "Class size parameter")->required();
  bf->add_option("--N", N, "Sample size")->required();
  bf->add_option("--delta", delta, "Failure probability")->capture_default_str();
  auto* bl = leaf(bounds, "loginequality", "Smallest safe x in x <= a ln x + b",
                  [&] { return scalar("bound", num(log_inequality_bound(la, lb))); });
  bl->add_option("--a", la, "Coefficient a >= 1")->required();
  bl->add_option("--b", lb, "Offset b > 0")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    for (const auto& a : args) {
      if (a.empty() || a[0] == '-') continue;
      if (app.get_subcommand_no_throw(a) == nullptr) what = "unknown subcommand '" + a + "'";
      break;
    }
    err << "error: " << what << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    if (!action) throw std::invalid_argument("no subcommand");
    const Output o = action();
    const bool json = g.format == "json";
    if (g.out.empty()) {
      render(o, json, out);
    } else {
      std::ofstream f(g.out);
      if (!f) throw std::invalid_argument("cannot open output file '" + g.out + "'");
      render(o, json, f);
    }
    if (o.exit_code == kExitVerificationFailed) err << "verification failed\n";
    return o.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace algotune
