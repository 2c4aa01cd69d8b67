#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "algotune/piecewise.hpp"

namespace algotune {

inline const std::string kGap = "-";

struct Sequence {
  std::vector<std::string> chars;
  std::string id;

  std::size_t size() const { return chars.size(); }
  bool operator==(const Sequence&) const = default;
};

// Builds a sequence from a string, one symbol per character.
Sequence make_sequence(const std::string& letters, std::string id = "");

struct Alignment {
  std::vector<std::vector<std::string>> rows;

  std::size_t columns() const { return rows.empty() ? 0 : rows[0].size(); }
  bool operator==(const Alignment&) const = default;
};

Alignment make_alignment(const std::vector<std::string>& rows);

// Row with gaps removed.
std::vector<std::string> ungapped(const std::vector<std::string>& row);

// Throws unless rows have equal length and no column is all gaps.
void validate_alignment(const Alignment& a);

struct AlignmentFeatures {
  long long matches = 0;
  long long mismatches = 0;
  long long indels = 0;
  long long gaps = 0;
  bool operator==(const AlignmentFeatures&) const = default;
};

struct AffineParams {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
};

AlignmentFeatures alignment_features(const Alignment& a);
double affine_objective(const AlignmentFeatures& f, const AffineParams& p);

struct AlignResult {
  Alignment alignment;
  AlignmentFeatures features;
  double objective = 0.0;
  std::int64_t tag = 0;  // hash of the traceback
};

inline constexpr std::size_t kDefaultMaxAlignLength = 10000;
inline constexpr std::size_t kDefaultMaxParametricLength = 500;

AlignResult affine_align(const Sequence& s1, const Sequence& s2, const AffineParams& p,
                         std::size_t max_length = kDefaultMaxAlignLength);

// Every pairwise alignment of two short sequences (lengths <= 6).
std::vector<Alignment> enumerate_alignments(const Sequence& s1, const Sequence& s2);

double q_score(const Alignment& candidate, const Alignment& reference);

Sequence consensus(const Alignment& a);

struct GuideTree {
  struct Node {
    int left = -1;
    int right = -1;
    int leaf = -1;  // 0-based sequence index for leaves
  };
  std::vector<Node> nodes;
  int root = -1;
};

// Newick subset: binary, leaf labels only. Labels resolve to sequence ids,
// or to 1-based indices when no id matches.
GuideTree parse_newick(const std::string& text, const std::vector<Sequence>& seqs);

struct ProgressiveTrace {
  Alignment msa;
  // Gapped alignment sequence of every tree node, over the final columns.
  std::vector<std::vector<std::string>> node_rows;
};

ProgressiveTrace progressive_align_trace(const std::vector<Sequence>& seqs, const GuideTree& tree,
                                         const AffineParams& p);
Alignment progressive_align(const std::vector<Sequence>& seqs, const GuideTree& tree,
                            const AffineParams& p);

PiecewiseFunction1D indel_breakpoints(const Sequence& s1, const Sequence& s2, double rho_max,
                                      std::size_t max_length = kDefaultMaxParametricLength);

PiecewiseFunction1D utility_breakpoints(const Sequence& s1, const Sequence& s2,
                                        const Alignment& reference, double rho_max,
                                        std::size_t max_length = kDefaultMaxParametricLength);

struct LbInstance {
  int k = 0;
  int N = 0;
  std::vector<std::pair<Sequence, Sequence>> pairs;
  std::vector<Alignment> references;
  std::vector<std::vector<double>> thresholds;  // ascending, per pair

  // Points separating every threshold of every pair, for shattering checks.
  std::vector<double> candidate_params() const;
};

LbInstance gen_lb_sequences(int n);

// The two-pair k = 3 example used to illustrate the construction.
LbInstance sketch_lb_instance();

std::vector<Sequence> read_fasta(std::istream& in);
std::vector<Sequence> read_fasta_file(const std::string& path);
void write_fasta(std::ostream& out, const Alignment& a, const std::vector<std::string>& ids);
Alignment alignment_from_fasta(const std::vector<Sequence>& rows);

}  // namespace algotune
