#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "algotune/bounds.hpp"
#include "algotune/cli.hpp"
#include "algotune/cluster.hpp"
#include "algotune/greedy.hpp"
#include "algotune/learn.hpp"
#include "algotune/mechanisms.hpp"
#include "algotune/piecewise.hpp"
#include "algotune/rnafold.hpp"
#include "algotune/seqalign.hpp"
#include "algotune/tad.hpp"

namespace py = pybind11;
using namespace algotune;

namespace {

std::string row_string(const std::vector<std::string>& row) {
  std::string s;
  for (const auto& c : row) s += c;
  return s;
}

py::dict align_dict(const AlignResult& r) {
  py::dict d;
  d["objective"] = r.objective;
  d["rows"] = std::vector<std::string>{row_string(r.alignment.rows[0]), row_string(r.alignment.rows[1])};
  d["matches"] = r.features.matches;
  d["mismatches"] = r.features.mismatches;
  d["indels"] = r.features.indels;
  d["gaps"] = r.features.gaps;
  return d;
}

TadWeights tad_weights(const std::vector<std::vector<double>>& matrix) { return precompute_cij(ContactMatrix(matrix)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parameter tuning for combinatorial algorithms and mechanisms";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<PiecewiseFunction1D>(m, "PiecewiseFunction")
      .def_property_readonly("lo", &PiecewiseFunction1D::lo)
      .def_property_readonly("hi", &PiecewiseFunction1D::hi)
      .def_property_readonly("breakpoints", &PiecewiseFunction1D::breakpoints)
      .def_property_readonly("pieces",
                             [](const PiecewiseFunction1D& f) {
                               std::vector<std::tuple<double, double, double, double>> out;
                               for (std::size_t i = 0; i < f.size(); ++i)
                                 out.emplace_back(f.piece_start(i), f.piece_end(i), f.pieces()[i].slope,
                                                  f.pieces()[i].intercept);
                               return out;
                             })
      .def("__len__", &PiecewiseFunction1D::size)
      .def("__call__", &PiecewiseFunction1D::operator(), py::arg("x"))
      .def("oscillations", [](const PiecewiseFunction1D& f, double z) { return count_oscillations(f, z); },
           py::arg("z"))
      .def("argmax", [](const PiecewiseFunction1D& f) {
        const auto a = argmax(f);
        return py::make_tuple(a.param, a.value, a.attained_in_limit);
      });

  // bounds
  m.def("pdim_from_counting", &pdim_from_counting, py::arg("vc_dual"), py::arg("pdim_dual"), py::arg("k"));
  m.def("pdim_from_oscillations", &pdim_from_oscillations, py::arg("B"));
  m.def("log_inequality_bound", &log_inequality_bound, py::arg("a"), py::arg("b"));
  m.def("spa_estimation_bound", &spa_estimation_bound, py::arg("N"), py::arg("delta") = 0.01);
  m.def("finite_class_bound", &finite_class_bound, py::arg("n"), py::arg("N"), py::arg("delta") = 0.01);
  m.def("generalization_bound", &generalization_bound, py::arg("H"), py::arg("pdim"), py::arg("N"), py::arg("delta"),
        py::arg("constant") = 1.0);

  // alignment
  m.def(
      "affine_align",
      [](const std::string& a, const std::string& b, double rho1, double rho2, double rho3) {
        return align_dict(affine_align(make_sequence(a), make_sequence(b), {rho1, rho2, rho3}));
      },
      py::arg("s1"), py::arg("s2"), py::arg("rho1") = 0.0, py::arg("rho2") = 0.0, py::arg("rho3") = 0.0);
  m.def(
      "indel_breakpoints",
      [](const std::string& a, const std::string& b, double rho_max) {
        return indel_breakpoints(make_sequence(a), make_sequence(b), rho_max);
      },
      py::arg("s1"), py::arg("s2"), py::arg("rho_max"));
  m.def(
      "q_score",
      [](const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
        return q_score(make_alignment(candidate), make_alignment(reference));
      },
      py::arg("candidate"), py::arg("reference"));

  // folding
  m.def(
      "fold",
      [](const std::string& seq, double rho) {
        const auto r = fold(parse_rna(seq), rho, StackScores::watson_crick());
        return py::make_tuple(r.objective, r.folding.pairs);
      },
      py::arg("seq"), py::arg("rho"), "Watson-Crick stacking scores; returns (objective, pairs).");
  m.def(
      "rho_breakpoints", [](const std::string& seq) { return rho_breakpoints(parse_rna(seq), StackScores::watson_crick()); },
      py::arg("seq"));

  // TADs
  m.def(
      "tad_optimize",
      [](const std::vector<std::vector<double>>& matrix, double rho, int min_length) {
        const auto r = tad_optimize(tad_weights(matrix), rho, min_length);
        return py::make_tuple(r.objective, r.tads.intervals);
      },
      py::arg("matrix"), py::arg("rho"), py::arg("min_length") = 1);
  m.def(
      "tad_decompose",
      [](const std::vector<std::vector<double>>& matrix, double rho_hi, double tol) {
        const auto d = rho_decomposition(tad_weights(matrix), rho_hi, tol);
        std::vector<std::tuple<double, double, std::vector<std::pair<int, int>>>> out;
        for (std::size_t i = 0; i < d.partition.size(); ++i)
          out.emplace_back(d.partition.piece_start(i), d.partition.piece_end(i),
                           d.sets[static_cast<std::size_t>(d.partition.pieces()[i].tag)].intervals);
        return out;
      },
      py::arg("matrix"), py::arg("rho_hi"), py::arg("tol") = 1e-9);

  // greedy
  m.def(
      "knapsack_greedy",
      [](std::vector<double> values, std::vector<double> sizes, double capacity, double rho) {
        const auto r = knapsack_greedy(KnapsackInstance{std::move(values), std::move(sizes), capacity}, rho);
        return py::make_tuple(r.total_value, r.items);
      },
      py::arg("values"), py::arg("sizes"), py::arg("capacity"), py::arg("rho"));
  m.def(
      "knapsack_breakpoints",
      [](std::vector<double> values, std::vector<double> sizes, double capacity, double rho_max) {
        return knapsack_breakpoints(KnapsackInstance{std::move(values), std::move(sizes), capacity}, rho_max);
      },
      py::arg("values"), py::arg("sizes"), py::arg("capacity"), py::arg("rho_max"));
  auto graph = [](const std::vector<double>& weights, const std::vector<std::pair<int, int>>& edges) {
    WeightedGraph g(weights);
    for (const auto& [u, v] : edges) g.add_edge(u, v);
    return g;
  };
  m.def(
      "mwis_greedy",
      [graph](const std::vector<double>& weights, const std::vector<std::pair<int, int>>& edges, double rho) {
        const auto r = mwis_greedy(graph(weights, edges), rho);
        return py::make_tuple(r.total_weight, r.vertices);
      },
      py::arg("weights"), py::arg("edges"), py::arg("rho"));
  m.def(
      "mwis_breakpoints",
      [graph](const std::vector<double>& weights, const std::vector<std::pair<int, int>>& edges, double rho_max) {
        return mwis_breakpoints(graph(weights, edges), rho_max);
      },
      py::arg("weights"), py::arg("edges"), py::arg("rho_max"));

  // clustering
  py::enum_<MergeFamily>(m, "MergeFamily")
      .value("C1", MergeFamily::C1)
      .value("C2", MergeFamily::C2)
      .value("C3", MergeFamily::C3);
  m.def(
      "agglomerate",
      [](const std::vector<std::vector<double>>& dist, MergeFamily family, double rho) {
        std::vector<std::pair<int, int>> out;
        for (const auto& mg : agglomerate(ClusterInstance(dist), family, rho).merges) out.emplace_back(mg.left, mg.right);
        return out;
      },
      py::arg("dist"), py::arg("family"), py::arg("rho"),
      "Merge sequence; leaves are 0..n-1 and merge t creates node n + t.");
  m.def(
      "cluster",
      [](const std::vector<std::vector<double>>& dist, MergeFamily family, double rho, int k) {
        const ClusterInstance inst(dist);
        const auto c = prune_tree(agglomerate(inst, family, rho), k, inst);
        return py::make_tuple(c.cost, c.clusters);
      },
      py::arg("dist"), py::arg("family"), py::arg("rho"), py::arg("k"));
  m.def(
      "c2_breakpoints",
      [](const std::vector<std::vector<double>>& dist, const std::vector<int>& labels, int k) {
        const ClusterInstance inst(dist);
        return c2_breakpoints(inst, pair_agreement_utility(inst, labels, k));
      },
      py::arg("dist"), py::arg("labels"), py::arg("k"));

  // mechanisms
  m.def(
      "nam",
      [](const std::vector<std::vector<double>>& values, const std::vector<double>& weights) {
        const auto v = ValuationProfile::dense(values);
        const NamParams p{weights};
        return py::make_tuple(nam_outcome(v, p), nam_payments(v, p), nam_welfare(v, p));
      },
      py::arg("values"), py::arg("weights"), "Returns (outcome, payments, welfare).");
  m.def(
      "spa_revenue",
      [](const std::vector<double>& bids, const std::vector<double>& reserves) {
        return spa_revenue(bids, ReserveVector{reserves});
      },
      py::arg("bids"), py::arg("reserves"));
  m.def(
      "anonymous_reserve_dual",
      [](const std::vector<double>& bids, double hi) { return anonymous_reserve_dual(bids, hi); }, py::arg("bids"),
      py::arg("hi") = 1.0);
  m.def(
      "nam_shattering",
      [](int n, double eps) {
        const auto c = verify_nam_shattering(nam_shatter_instances(n, eps));
        return py::make_tuple(c.shattered, c.pattern_count());
      },
      py::arg("n"), py::arg("epsilon") = 0.25);

  // experiments
  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
        py::gil_scoped_release release;
        return experiment_csv(run_experiment(cfg));
      },
      py::arg("config_json"), "Runs an experiment from a JSON config string and returns the CSV text.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}
