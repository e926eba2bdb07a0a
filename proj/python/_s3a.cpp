// Python bindings. Matrices cross the boundary as 2-D float64 NumPy arrays
// (rows = features, columns = samples); they are always copied.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "s3a/autoencoder.hpp"
#include "s3a/classifier.hpp"
#include "s3a/datakit.hpp"
#include "s3a/error.hpp"
#include "s3a/matrix.hpp"
#include "s3a/partition.hpp"
#include "s3a/protocol.hpp"
#include "s3a/sparsity.hpp"
#include "s3a/trainer.hpp"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

s3a::Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw s3a::Error(s3a::Errc::ShapeError, "expected a 2-D array");
  s3a::Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  if (m.size() != 0) std::memcpy(m.data().data(), a.data(), m.size() * sizeof(double));
  return m;
}

Array to_array(const s3a::Matrix& m) {
  Array a({m.rows(), m.cols()});
  if (m.size() != 0) std::memcpy(a.mutable_data(), m.data().data(), m.size() * sizeof(double));
  return a;
}

s3a::PenaltyKind parse_kind(const std::string& s) {
  if (s == "l1") return s3a::PenaltyKind::L1;
  if (s == "class_l21") return s3a::PenaltyKind::ClassL21;
  if (s == "subclass_l21") return s3a::PenaltyKind::SubclassL21;
  throw s3a::Error(s3a::Errc::InvalidArgument, "penalty kind must be l1, class_l21 or subclass_l21");
}

s3a::PenaltySpec make_spec(const std::string& kind, double lambda,
                           const std::optional<s3a::GroupPartition>& partition) {
  return s3a::PenaltySpec{parse_kind(kind), lambda, partition};
}

}  // namespace

PYBIND11_MODULE(_s3a, m) {
  m.doc() = "Subclass supervised sparse autoencoder core";

  static py::exception<s3a::Error> error(m, "S3AError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const s3a::Error& e) {
      py::object exc = error;
      py::object inst = exc(std::string(s3a::errc_name(e.code())) + ": " + e.what());
      inst.attr("code") = std::string(s3a::errc_name(e.code()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  // numerics
  m.def("sigmoid", [](const Array& a) { return to_array(s3a::sigmoid(to_matrix(a))); });
  m.def("l21_norm", [](const Array& a) { return s3a::l21_norm(to_matrix(a)); });
  m.def("frobenius_sq", [](const Array& a) { return s3a::frobenius_sq(to_matrix(a)); });

  // partition
  py::class_<s3a::GroupPartition>(m, "GroupPartition")
      .def_property_readonly("sample_count", &s3a::GroupPartition::sample_count)
      .def_property_readonly("class_count", &s3a::GroupPartition::class_count)
      .def_property_readonly("groups", [](const s3a::GroupPartition& p) {
        py::dict out;
        for (const auto& g : p.groups()) {
          out[py::make_tuple(g.class_label, g.subclass_label)] = g.indices;
        }
        return out;
      });
  m.def("build_partition", [](const std::vector<int>& c, const std::vector<int>& s) {
    return s3a::build_partition(c, s);
  });

  // autoencoder
  py::class_<s3a::AutoencoderParams>(m, "AutoencoderParams")
      .def_readonly("input_dim", &s3a::AutoencoderParams::input_dim)
      .def_property_readonly("hidden_dims", &s3a::AutoencoderParams::hidden_dims)
      .def_property_readonly("weights",
                             [](const s3a::AutoencoderParams& p) {
                               py::list out;
                               for (const auto& l : p.layers) {
                                 out.append(py::make_tuple(to_array(l.W), to_array(l.W_prime)));
                               }
                               return out;
                             })
      .def_readwrite("input_mean", &s3a::AutoencoderParams::input_mean)
      .def("__eq__", [](const s3a::AutoencoderParams& a, const s3a::AutoencoderParams& b) {
        return a == b;
      });
  m.def("default_hidden_dims", &s3a::default_hidden_dims);
  m.def("init_params", &s3a::init_params, py::arg("input_dim"), py::arg("hidden_dims"),
        py::arg("seed"));
  m.def("encode_stack", [](const s3a::AutoencoderParams& p, const Array& X) {
    return to_array(s3a::encode_stack(p, to_matrix(X)));
  });
  m.def("extract_features", [](const s3a::AutoencoderParams& p, const Array& X) {
    return to_array(s3a::extract_features(p, to_matrix(X)));
  });
  m.def("save_model", [](const std::string& path, const s3a::AutoencoderParams& p, double lambda,
                         std::uint64_t seed, const std::string& stage) {
    s3a::save_model(path, p, {lambda, seed, stage});
  }, py::arg("path"), py::arg("params"), py::arg("lam") = 0.0, py::arg("seed") = 0,
        py::arg("stage") = "init");
  m.def("load_model", [](const std::string& path) {
    auto f = s3a::load_model(path);
    return py::make_tuple(f.params, f.info.lambda, f.info.seed, f.info.training_stage);
  });

  // sparsity
  m.def("penalty_value",
        [](const std::string& kind, double lambda, const Array& W, const Array& X,
           const std::optional<s3a::GroupPartition>& partition) {
          return s3a::penalty_value(make_spec(kind, lambda, partition), to_matrix(W), to_matrix(X));
        },
        py::arg("kind"), py::arg("lam"), py::arg("W"), py::arg("X"),
        py::arg("partition") = py::none());

  // trainer
  py::class_<s3a::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lam", &s3a::TrainConfig::lambda)
      .def_readwrite("learning_rate", &s3a::TrainConfig::learning_rate)
      .def_readwrite("pretrain_epochs", &s3a::TrainConfig::pretrain_epochs)
      .def_readwrite("finetune_epochs", &s3a::TrainConfig::finetune_epochs)
      .def_readwrite("irls_refresh_every", &s3a::TrainConfig::irls_refresh_every)
      .def_readwrite("epsilon", &s3a::TrainConfig::epsilon)
      .def_readwrite("seed", &s3a::TrainConfig::seed)
      .def_readwrite("grad_clip", &s3a::TrainConfig::grad_clip)
      .def_readwrite("tolerance", &s3a::TrainConfig::tolerance)
      .def_readwrite("patience", &s3a::TrainConfig::patience);

  py::class_<s3a::TrainReport>(m, "TrainReport")
      .def_readonly("stop_reasons", &s3a::TrainReport::stop_reasons)
      .def_readonly("final_objective", &s3a::TrainReport::final_objective)
      .def_property_readonly("epochs_run", &s3a::TrainReport::epochs_run)
      .def_property_readonly("totals",
                             [](const s3a::TrainReport& r) {
                               std::vector<double> t;
                               for (const auto& e : r.epochs) t.push_back(e.total);
                               return t;
                             })
      .def("to_jsonl", &s3a::TrainReport::to_jsonl);

  m.def("pretrain", [](const Array& X, const std::vector<std::size_t>& dims,
                       const s3a::TrainConfig& cfg) { return s3a::pretrain(to_matrix(X), dims, cfg); });
  m.def("finetune", [](const s3a::AutoencoderParams& p, const Array& X,
                       const s3a::GroupPartition& part, const s3a::TrainConfig& cfg) {
    return s3a::finetune(p, to_matrix(X), part, cfg);
  });
  m.def("objective",
        [](const s3a::AutoencoderParams& p, const Array& X,
           const std::optional<s3a::GroupPartition>& part, const s3a::TrainConfig& cfg) {
          const auto t = s3a::objective(p, to_matrix(X), part, cfg);
          return py::make_tuple(t.recon, t.penalty);
        });
  m.def("grad_check", [](const s3a::AutoencoderParams& p, const Array& X,
                         const s3a::GroupPartition& part, const s3a::TrainConfig& cfg) {
    return s3a::grad_check(p, to_matrix(X), part, cfg);
  });

  // classifier
  py::class_<s3a::SvmModel>(m, "SvmModel")
      .def_readonly("w", &s3a::SvmModel::w)
      .def_readonly("b", &s3a::SvmModel::b)
      .def("to_json", [](const s3a::SvmModel& s) { return s3a::svm_to_json(s); });
  m.def("train_svm",
        [](const Array& F, const std::vector<int>& labels, double cost_pos, double cost_neg,
           std::size_t epochs) {
          s3a::SvmOptions o;
          o.cost_pos = cost_pos;
          o.cost_neg = cost_neg;
          o.epochs = epochs;
          return s3a::train_svm(to_matrix(F), labels, o);
        },
        py::arg("features"), py::arg("labels"), py::arg("cost_pos") = 1.0,
        py::arg("cost_neg") = 1.0, py::arg("epochs") = 200);
  m.def("decision_values", [](const s3a::SvmModel& s, const Array& F) {
    return s3a::decision_values(s, to_matrix(F));
  });
  m.def("roc_points", [](const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : s3a::roc_points(scores, labels)) out.emplace_back(p.fpr, p.tpr);
    return out;
  });
  m.def("roc_auc", [](const std::vector<double>& scores, const std::vector<int>& labels) {
    return s3a::roc_auc(s3a::roc_points(scores, labels));
  });

  // datakit
  py::class_<s3a::SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("input_dim", &s3a::SynthConfig::input_dim)
      .def_readwrite("classes", &s3a::SynthConfig::classes)
      .def_readwrite("subclasses_per_class", &s3a::SynthConfig::subclasses_per_class)
      .def_readwrite("samples_per_group", &s3a::SynthConfig::samples_per_group)
      .def_readwrite("class_shift", &s3a::SynthConfig::class_shift)
      .def_readwrite("subclass_shift", &s3a::SynthConfig::subclass_shift)
      .def_readwrite("noise_sigma", &s3a::SynthConfig::noise_sigma)
      .def_readwrite("seed", &s3a::SynthConfig::seed);

  py::class_<s3a::DatasetManifest>(m, "DatasetManifest")
      .def("__len__", &s3a::DatasetManifest::size)
      .def("to_csv", [](const s3a::DatasetManifest& d) { return s3a::format_manifest(d); })
      .def_static("from_csv", [](const std::string& t) { return s3a::parse_manifest(t); })
      .def_property_readonly("class_ids", [](const s3a::DatasetManifest& d) { return s3a::class_ids(d); })
      .def_property_readonly("svm_labels", [](const s3a::DatasetManifest& d) { return s3a::svm_labels(d); })
      .def_property_readonly("subclass_ids", [](const s3a::DatasetManifest& d) {
        return s3a::subclass_ids(d, s3a::subclass_vocabulary(d));
      });

  m.def("generate_synthetic", [](const s3a::SynthConfig& cfg) {
    auto d = s3a::generate_synthetic(cfg);
    return py::make_tuple(to_array(d.X), d.manifest);
  });
  m.def("save_features", [](const std::string& path, const Array& X) {
    s3a::save_features(path, to_matrix(X));
  });
  m.def("load_features", [](const std::string& path) { return to_array(s3a::load_features(path)); });
  m.def("load_manifest", &s3a::load_manifest);
  m.def("save_manifest", &s3a::save_manifest);

  // protocol
  m.def("run_cross_ethnicity",
        [](const s3a::DatasetManifest& man, const Array& raw, const s3a::AutoencoderParams& pre,
           const s3a::TrainConfig& train, std::size_t folds, std::uint64_t seed) {
          s3a::PipelineConfig cfg;
          cfg.train = train;
          cfg.folds = folds;
          cfg.seed = seed;
          return s3a::report_to_json(s3a::run_cross_ethnicity(man, to_matrix(raw), pre, cfg));
        },
        py::arg("manifest"), py::arg("raw"), py::arg("pretrained"), py::arg("train"),
        py::arg("folds") = 5, py::arg("seed") = 1);
  m.def("render_cross_table", [](const std::string& report_json) {
    return s3a::render_cross_table(s3a::report_from_json(report_json));
  });
}
