// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "velocomp/composer.hpp"
#include "velocomp/czsl/io.hpp"
#include "velocomp/czsl/metrics.hpp"
#include "velocomp/data/fceb.hpp"
#include "velocomp/data/synthetic.hpp"
#include "velocomp/error.hpp"
#include "velocomp/pipeline/commands.hpp"

namespace py = pybind11;
using namespace velocomp;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw ShapeError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

czsl::ScoreMatrix to_matrix(const DoubleArray& scores,
                            const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& truth,
                            const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& seen_mask) {
  if (scores.ndim() != 2) throw ShapeError("scores must be 2-D");
  czsl::ScoreMatrix m(scores.shape(0), scores.shape(1));
  std::memcpy(m.scores.data(), scores.data(), m.scores.size() * sizeof(double));
  if (truth.size() != static_cast<py::ssize_t>(m.rows)) throw ShapeError("truth needs one entry per row");
  if (seen_mask.size() != static_cast<py::ssize_t>(m.cols)) throw ShapeError("seen_mask needs one entry per column");
  std::memcpy(m.truth.data(), truth.data(), m.rows * sizeof(std::uint32_t));
  std::memcpy(m.seen_mask.data(), seen_mask.data(), m.cols);
  m.validate();
  return m;
}

py::tuple from_matrix(const czsl::ScoreMatrix& m) {
  DoubleArray scores({m.rows, m.cols});
  std::memcpy(scores.mutable_data(), m.scores.data(), m.scores.size() * sizeof(double));
  py::array_t<std::uint32_t> truth(m.rows);
  std::memcpy(truth.mutable_data(), m.truth.data(), m.rows * sizeof(std::uint32_t));
  py::array_t<std::uint8_t> seen(m.cols);
  std::memcpy(seen.mutable_data(), m.seen_mask.data(), m.cols);
  return py::make_tuple(scores, truth, seen);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_list(const std::vector<czsl::Pair>& pairs) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (auto p : pairs) out.emplace_back(p.attr, p.obj);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "velocomp native core";

  // Translators run newest first, so the base class goes first.
  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<ShapeError>(m, "ShapeError", error);
  py::register_exception<ContractError>(m, "ContractError", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<FormatError>(m, "FormatError", error);
  auto data_error = py::register_exception<DataError>(m, "DataError", error);
  py::register_exception<SplitError>(m, "SplitError", data_error);
  py::register_exception<ProtocolError>(m, "ProtocolError", error);
  py::register_exception<CheckpointError>(m, "CheckpointError", error);
  py::register_exception<IoError>(m, "IoError", error);
  py::register_exception<NumericError>(m, "NumericError", error);

  // ------------------------------------------------------------ composer
  m.def(
      "least_squares_coefficients",
      [](const DoubleArray& delta_a, const DoubleArray& delta_o, const DoubleArray& v_star) {
        const auto a = to_vector(delta_a), o = to_vector(delta_o), v = to_vector(v_star);
        const auto t = composer::least_squares_coefficients(a, o, v);
        return py::make_tuple(t.a_star, t.b_star, t.damped);
      },
      py::arg("delta_a"), py::arg("delta_o"), py::arg("v_star"), "Returns (a_star, b_star, damped).");

  // ------------------------------------------------------------- metrics
  py::class_<czsl::CurvePoint>(m, "CurvePoint")
      .def_readonly("bias", &czsl::CurvePoint::bias)
      .def_readonly("seen", &czsl::CurvePoint::seen)
      .def_readonly("unseen", &czsl::CurvePoint::unseen);

  py::class_<czsl::EvalReport>(m, "EvalReport")
      .def_readonly("best_seen", &czsl::EvalReport::best_seen)
      .def_readonly("best_unseen", &czsl::EvalReport::best_unseen)
      .def_readonly("best_hm", &czsl::EvalReport::best_hm)
      .def_readonly("auc", &czsl::EvalReport::auc)
      .def_readonly("curve", &czsl::EvalReport::curve)
      .def("key_values", [](const czsl::EvalReport& r) { return czsl::report_key_values(r); })
      .def("table", [](const czsl::EvalReport& r, const std::string& title) { return czsl::report_table(r, title); },
           py::arg("title") = "");

  m.def("harmonic_mean", &czsl::harmonic_mean, py::arg("seen"), py::arg("unseen"));
  m.def(
      "bias_sweep",
      [](const DoubleArray& scores, const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& truth,
         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& seen_mask) {
        return czsl::bias_sweep(to_matrix(scores, truth, seen_mask));
      },
      py::arg("scores"), py::arg("truth"), py::arg("seen_mask"),
      "Calibration-bias sweep; masked entries are -inf.");
  m.def(
      "save_score_matrix",
      [](const std::filesystem::path& path, const DoubleArray& scores,
         const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& truth,
         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& seen_mask) {
        czsl::save_score_matrix(to_matrix(scores, truth, seen_mask), path);
      },
      py::arg("path"), py::arg("scores"), py::arg("truth"), py::arg("seen_mask"));
  m.def(
      "load_score_matrix", [](const std::filesystem::path& path) { return from_matrix(czsl::load_score_matrix(path)); },
      py::arg("path"), "Returns (scores, truth, seen_mask).");

  // ---------------------------------------------------------------- data
  py::class_<data::SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("attributes", &data::SyntheticConfig::attributes)
      .def_readwrite("objects", &data::SyntheticConfig::objects)
      .def_readwrite("dim", &data::SyntheticConfig::dim)
      .def_readwrite("seen_fraction", &data::SyntheticConfig::seen_fraction)
      .def_readwrite("attr_noise", &data::SyntheticConfig::attr_noise)
      .def_readwrite("obj_noise", &data::SyntheticConfig::obj_noise)
      .def_readwrite("leakage", &data::SyntheticConfig::leakage)
      .def_readwrite("modality_gap", &data::SyntheticConfig::modality_gap)
      .def_readwrite("train_per_pair", &data::SyntheticConfig::train_per_pair)
      .def_readwrite("eval_per_pair", &data::SyntheticConfig::eval_per_pair)
      .def_readwrite("multi_path", &data::SyntheticConfig::multi_path)
      .def_readwrite("seed", &data::SyntheticConfig::seed)
      .def("validate", &data::SyntheticConfig::validate);

  py::class_<data::EmbeddingDataset>(m, "Dataset")
      .def_readonly("dim", &data::EmbeddingDataset::dim)
      .def_property_readonly("attributes", [](const data::EmbeddingDataset& d) { return d.label_space.attribute_count(); })
      .def_property_readonly("objects", [](const data::EmbeddingDataset& d) { return d.label_space.object_count(); })
      .def_property_readonly("seen_pairs", [](const data::EmbeddingDataset& d) { return pair_list(d.label_space.seen()); })
      .def_property_readonly("unseen_pairs",
                             [](const data::EmbeddingDataset& d) { return pair_list(d.label_space.unseen()); })
      .def_property_readonly("multi_path", &data::EmbeddingDataset::multi_path)
      .def_property_readonly("sample_count", [](const data::EmbeddingDataset& d) { return d.samples.size(); })
      .def("split_size",
           [](const data::EmbeddingDataset& d, const std::string& split) {
             return d.split_indices(data::parse_split(split)).size();
           })
      .def("summary", [](const data::EmbeddingDataset& d) { return pipeline::dataset_summary(d); })
      .def("encode", [](const data::EmbeddingDataset& d) { return py::bytes(data::encode_dataset(d)); });

  m.def("generate_synthetic", &data::generate_synthetic, py::arg("config"));
  m.def("load_dataset", &data::load_dataset, py::arg("path"));
  m.def("save_dataset", &data::save_dataset, py::arg("dataset"), py::arg("path"));
  m.def(
      "decode_dataset", [](const py::bytes& b) { return data::decode_dataset(std::string(b)); }, py::arg("data"));

  // ------------------------------------------------------------ pipeline
  py::class_<pipeline::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def("set", [](pipeline::RunConfig& c, const std::string& k,
                     const std::string& v) { pipeline::apply_setting(c, k, v); }, py::arg("key"), py::arg("value"))
      .def("dump", [](const pipeline::RunConfig& c) { return pipeline::dump_config(c); })
      .def("validate", &pipeline::RunConfig::validate, py::arg("need_dataset") = false)
      .def_readwrite("synthetic", &pipeline::RunConfig::synthetic)
      .def_readwrite("out", &pipeline::RunConfig::out)
      .def_readwrite("seed", &pipeline::RunConfig::seed);
  m.def("load_config", &pipeline::load_config, py::arg("path"));

  py::class_<pipeline::EpochLoss>(m, "EpochLoss")
      .def_readonly("epoch", &pipeline::EpochLoss::epoch)
      .def_readonly("stage", &pipeline::EpochLoss::stage)
      .def_readonly("loss", &pipeline::EpochLoss::loss);

  py::class_<pipeline::Models>(m, "Models")
      .def("save", [](pipeline::Models& models, const std::filesystem::path& dir) { pipeline::save_models(models, dir); });
  m.def("init_models", &pipeline::init_models, py::arg("dim"), py::arg("config"));
  m.def("load_models", &pipeline::load_models, py::arg("dir"), py::arg("dim"));

  py::class_<pipeline::TrainResult>(m, "TrainResult")
      .def_readonly("models", &pipeline::TrainResult::models)
      .def_readonly("losses", &pipeline::TrainResult::losses)
      .def_readonly("leakage_enabled", &pipeline::TrainResult::leakage_enabled);
  m.def(
      "train",
      [](const data::EmbeddingDataset& ds, const pipeline::RunConfig& c) {
        py::gil_scoped_release release;
        return pipeline::train(ds, c);
      },
      py::arg("dataset"), py::arg("config"));

  py::class_<pipeline::EvalOutputs>(m, "EvalOutputs")
      .def_readonly("closed", &pipeline::EvalOutputs::closed)
      .def_readonly("open", &pipeline::EvalOutputs::open)
      .def_readonly("threshold", &pipeline::EvalOutputs::threshold)
      .def_readonly("masked_pairs", &pipeline::EvalOutputs::masked_pairs)
      .def_property_readonly("closed_scores",
                             [](const pipeline::EvalOutputs& o) { return from_matrix(o.closed_scores); });
  m.def(
      "evaluate",
      [](const data::EmbeddingDataset& ds, pipeline::Models& models, const pipeline::RunConfig& c) {
        py::gil_scoped_release release;
        return pipeline::evaluate(ds, models, c);
      },
      py::arg("dataset"), py::arg("models"), py::arg("config"));
  m.def("probe", [](const pipeline::RunConfig& c) { return pipeline::cmd_probe(c); }, py::arg("config"),
        "Leakage probe table for the dataset the config names.");
}
