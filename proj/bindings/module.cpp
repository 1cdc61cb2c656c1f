#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "katgnn/bins.hpp"
#include "katgnn/cohort_io.hpp"
#include "katgnn/config.hpp"
#include "katgnn/cooccurrence.hpp"
#include "katgnn/metrics.hpp"
#include "katgnn/ontology.hpp"
#include "katgnn/optim.hpp"
#include "katgnn/synth.hpp"
#include "katgnn/trainer.hpp"

namespace py = pybind11;
using namespace katgnn;

namespace {

ScoredLabels make_scored(const std::vector<double>& scores, const std::vector<int>& labels) {
  return ScoredLabels{scores, labels};
}

py::dict run_result_dict(const RunResult& r, const std::string& setting) {
  py::dict d;
  d["setting"] = setting;
  d["seed"] = r.seed;
  d["auroc"] = r.test_auroc;
  d["auprc"] = r.test_auprc;
  d["epoch"] = r.selected_epoch;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "KAT-GNN clinical risk prediction pipeline (C++ core)";

  m.def("auroc",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
          return auroc(make_scored(scores, labels));
        },
        py::arg("scores"), py::arg("labels"),
        "Mann-Whitney AUROC with tie handling");
  m.def("auprc",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
          return auprc(make_scored(scores, labels));
        },
        py::arg("scores"), py::arg("labels"),
        "Average precision with tied scores grouped per threshold");

  m.def("fit_bins",
        [](const std::map<std::string, std::vector<double>>& values, int bins) {
          std::map<std::string, std::vector<double>> out;
          for (const auto& [item, bounds] : fit_bins(values, bins).boundaries)
            out[item] = bounds;
          return out;
        },
        py::arg("train_values"), py::arg("bins"),
        "Nearest-rank quantile boundaries per item");
  m.def("assign_bin",
        [](const std::vector<double>& boundaries, double value) {
          BinSpec spec;
          spec.max_bins = static_cast<int>(boundaries.size()) + 1;
          spec.boundaries["_"] = boundaries;
          return assign_bin("_", value, spec);
        },
        py::arg("boundaries"), py::arg("value"),
        "Right-closed bin index: boundaries strictly below value");

  py::class_<Ontology>(m, "Ontology")
      .def_static("from_edges", &Ontology::build, py::arg("parent_edges"),
                  "Build from (child, parent) pairs")
      .def_static("from_csv", &load_ontology, py::arg("path"))
      .def("root", &Ontology::root)
      .def("concepts", &Ontology::concepts)
      .def("depth", &Ontology::depth, py::arg("concept"))
      .def("lcs_depth", &Ontology::lcs_depth, py::arg("a"), py::arg("b"))
      .def("lcs_path", &Ontology::lcs_path, py::arg("a"), py::arg("b"))
      .def("is_ancestor", &Ontology::is_ancestor, py::arg("ancestor"),
           py::arg("descendant"));

  m.def("most_general_concept",
        [](const Ontology& onto, const std::vector<std::string>& candidates) {
          return most_general_concept(onto, candidates);
        },
        py::arg("ontology"), py::arg("candidates"));

  m.def("mine",
        [](const std::vector<std::vector<std::string>>& transactions,
           int64_t min_pair_count) {
          TransactionSet tx;
          for (const auto& t : transactions) tx.transactions.emplace_back(t.begin(), t.end());
          const LiftTable table = mine(tx, min_pair_count);
          std::vector<py::tuple> out;
          for (const auto& [key, stats] : table.pairs)
            out.push_back(py::make_tuple(key.first, key.second, stats.support_ab,
                                         stats.lift));
          return out;
        },
        py::arg("transactions"), py::arg("min_pair_count") = 1,
        "Per-pair (a, b, support, lift) over visit transactions");
  m.def("cooccurrence_edges",
        [](const std::vector<std::vector<std::string>>& transactions,
           int64_t min_pair_count) {
          TransactionSet tx;
          for (const auto& t : transactions) tx.transactions.emplace_back(t.begin(), t.end());
          return cooccurrence_edges(mine(tx, min_pair_count));
        },
        py::arg("transactions"), py::arg("min_pair_count") = 1,
        "Unordered pairs with lift strictly above 1");

  m.def("one_cycle_lr", &ad::one_cycle_lr, py::arg("step"), py::arg("total_steps"),
        py::arg("max_lr") = 0.01);

  m.def("generate_synthetic",
        [](const std::string& out_dir, int n, const std::string& signal, uint64_t seed,
           double positive_rate, int diag_codes, int meas_items, int visits_min,
           int visits_max) {
          SynthConfig cfg;
          cfg.n_patients = n;
          cfg.signal = SignalMode::parse(signal);
          cfg.seed = seed;
          cfg.positive_rate = positive_rate;
          cfg.n_diag_codes = diag_codes;
          cfg.n_meas_items = meas_items;
          cfg.visits_min = visits_min;
          cfg.visits_max = visits_max;
          const SynthCohort cohort = generate_synthetic(cfg);
          save_synthetic(cohort, out_dir);
          return static_cast<int>(cohort.records.size());
        },
        py::arg("out_dir"), py::arg("n") = 1000, py::arg("signal") = "none",
        py::arg("seed") = 1, py::arg("positive_rate") = 0.25,
        py::arg("diag_codes") = 60, py::arg("meas_items") = 15,
        py::arg("visits_min") = 2, py::arg("visits_max") = 6,
        "Generate a synthetic cohort and write its CSVs into out_dir");

  m.def("train",
        [](const std::string& data_dir, const std::vector<uint64_t>& seeds,
           const std::string& config_text, bool baseline, int threads) {
          TrainConfig cfg = config_text.empty()
                                ? TrainConfig{}
                                : parse_config_text(config_text, "<config>");
          cfg.threads = threads;
          auto records = load_cohort(CohortFiles::in_dir(data_dir));
          const Ontology onto = load_ontology(data_dir + "/ontology.csv");
          const ConceptMapping mapping = load_mapping(data_dir + "/mapping.csv", onto);
          std::vector<py::dict> out;
          for (uint64_t seed : seeds) {
            const PreparedCohort prep = prepare_cohort(records, onto, mapping, cfg, seed);
            out.push_back(run_result_dict(train_one(prep, cfg, seed), "default"));
            if (baseline)
              out.push_back(run_result_dict(baseline_logistic(prep, cfg, seed), "baseline"));
          }
          return out;
        },
        py::arg("data_dir"), py::arg("seeds"), py::arg("config_text") = "",
        py::arg("baseline") = false, py::arg("threads") = 1,
        "Train per seed on a data directory; returns one dict per run");
}
