#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sheeppain/sheeppain.hpp"

namespace py = pybind11;
namespace sp = sheeppain;

namespace {

py::dict report_dict(const sp::PainReport& r) {
  py::dict d;
  d["nps"] = r.nps;
  d["total_pain"] = r.total_pain;
  d["max_pain"] = r.max_pain;
  d["cluster_scores"] = r.cluster_scores;
  d["members"] = r.members;
  d["assignments"] = r.assignment.assignments;
  d["distributions"] = r.assignment.distributions;
  d["kept_edges"] = std::vector<int>(r.kept_edges.begin(), r.kept_edges.end());
  d["parse_score"] = r.parse_score;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sheeppain, m) {
  m.doc() = "Facial pain scoring engine: parse graphs, message passing, pain aggregation.";

  static py::exception<sp::Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sp::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("kind") = std::string(sp::kind_name(e.kind()));
      exc.attr("line") = e.line() ? py::cast(*e.line()) : py::none();
      exc.attr("field") = e.field();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::enum_<sp::PartLabel>(m, "PartLabel")
      .value("EF", sp::PartLabel::EF)
      .value("EFP", sp::PartLabel::EFP)
      .value("ER", sp::PartLabel::ER)
      .value("EyE", sp::PartLabel::EyE)
      .value("EyN", sp::PartLabel::EyN)
      .value("EyPC", sp::PartLabel::EyPC)
      .value("NExV", sp::PartLabel::NExV)
      .value("NSU", sp::PartLabel::NSU)
      .value("NNC", sp::PartLabel::NNC)
      .value("NSV", sp::PartLabel::NSV);

  m.def("class_lookup", [](const std::string& label) {
    const auto c = sp::class_lookup(label);
    return py::make_tuple(std::string(sp::part_name(c.part)), c.default_pain);
  }, py::arg("label"), "(facial part, default pain) for a detector class label.");

  py::class_<sp::BBox>(m, "BBox")
      .def(py::init<double, double, double, double>(), py::arg("x"), py::arg("y"),
           py::arg("w"), py::arg("h"))
      .def_readwrite("x", &sp::BBox::x)
      .def_readwrite("y", &sp::BBox::y)
      .def_readwrite("w", &sp::BBox::w)
      .def_readwrite("h", &sp::BBox::h)
      .def(py::self == py::self)
      .def("__repr__", [](const sp::BBox& b) {
        std::ostringstream s;
        s << "BBox(" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << ")";
        return s.str();
      });

  py::class_<sp::Detection>(m, "Detection")
      .def(py::init<>())
      .def(py::init([](const std::string& label, int pain, sp::BBox bbox, double confidence,
                       std::uint64_t frame_id, std::int64_t timestamp) {
             sp::Detection d;
             d.label = sp::class_lookup(label).label;
             d.pain_level = pain;
             d.bbox = bbox;
             d.confidence = confidence;
             d.frame_id = frame_id;
             d.timestamp = timestamp;
             sp::validate(d);
             return d;
           }),
           py::arg("label"), py::arg("pain_level"), py::arg("bbox"), py::arg("confidence"),
           py::arg("frame_id") = 0, py::arg("timestamp") = 0)
      .def_readwrite("frame_id", &sp::Detection::frame_id)
      .def_readwrite("timestamp", &sp::Detection::timestamp)
      .def_readwrite("label", &sp::Detection::label)
      .def_readwrite("bbox", &sp::Detection::bbox)
      .def_readwrite("confidence", &sp::Detection::confidence)
      .def_readwrite("pain_level", &sp::Detection::pain_level)
      .def(py::self == py::self)
      .def("__repr__", [](const sp::Detection& d) { return sp::serialize_detection(d); });

  m.def("parse_detections", [](const std::string& text, bool permissive) {
    sp::ParseOptions o;
    o.permissive = permissive;
    return sp::parse_detections(text, o).detections;
  }, py::arg("text"), py::arg("permissive") = false);
  m.def("serialize_detections", [](const std::vector<sp::Detection>& d) {
    std::ostringstream out;
    sp::write_detections(out, d);
    return out.str();
  });
  m.def("filter_confidence",
        [](const std::vector<sp::Detection>& d, double threshold) {
          return sp::filter_confidence(d, threshold);
        },
        py::arg("detections"),
        py::arg("threshold") = sp::kDefaultConfidenceThreshold);
  m.def("rotate_bbox",
        py::overload_cast<const sp::BBox&, double>(&sp::rotate_bbox),
        py::arg("bbox"), py::arg("theta_degrees"));
  m.def("rotate_bbox",
        [](const sp::BBox& b, double theta, double cx, double cy) {
          return sp::rotate_bbox(b, theta, sp::Point{cx, cy});
        },
        py::arg("bbox"), py::arg("theta_degrees"), py::arg("cx"), py::arg("cy"));

  py::class_<sp::LabeledSample>(m, "LabeledSample")
      .def_readonly("detections", &sp::LabeledSample::detections)
      .def_readonly("cluster_labels", &sp::LabeledSample::cluster_labels)
      .def_property_readonly("edge_labels", [](const sp::LabeledSample& s) {
        std::vector<std::tuple<int, int, bool>> out;
        for (const auto& e : s.edge_labels) out.emplace_back(e.i, e.j, e.keep);
        return out;
      });
  m.def("generate_dataset", &sp::generate_dataset, py::arg("seed"), py::arg("n_samples"),
        py::arg("separation"));

  py::class_<sp::Frame>(m, "Frame")
      .def(py::init([](std::int64_t t, std::vector<sp::Detection> d) {
             return sp::Frame{t, std::move(d)};
           }),
           py::arg("timestamp"), py::arg("detections"))
      .def_readonly("timestamp", &sp::Frame::timestamp)
      .def_readonly("detections", &sp::Frame::detections);
  m.def("generate_monitoring_scenario",
        [](std::uint64_t seed, std::size_t days, std::size_t frames_per_day,
           const std::string& trend, double noise) {
          sp::ScenarioOptions o;
          o.days = days;
          o.frames_per_day = frames_per_day;
          o.trend = sp::parse_trend(trend);
          o.noise = noise;
          return sp::generate_monitoring_scenario(seed, o);
        },
        py::arg("seed"), py::arg("days") = 5, py::arg("frames_per_day") = 10,
        py::arg("trend") = "rising", py::arg("noise") = 0.0);

  py::class_<sp::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &sp::TrainConfig::learning_rate)
      .def_readwrite("beta1", &sp::TrainConfig::beta1)
      .def_readwrite("beta2", &sp::TrainConfig::beta2)
      .def_readwrite("epsilon", &sp::TrainConfig::epsilon)
      .def_readwrite("batch_size", &sp::TrainConfig::batch_size)
      .def_readwrite("epochs", &sp::TrainConfig::epochs)
      .def_readwrite("seed", &sp::TrainConfig::seed);

  py::class_<sp::ModelParams>(m, "ModelParams")
      .def_property_readonly("num_layers", &sp::ModelParams::num_layers)
      .def_property_readonly("num_clusters", &sp::ModelParams::num_clusters)
      .def_property_readonly("feature_dim", &sp::ModelParams::feature_dim)
      .def_property_readonly("edge_scorer", [](const sp::ModelParams& p) {
        return py::make_tuple(p.edge_scorer.weights[0], p.edge_scorer.weights[1],
                              p.edge_scorer.bias);
      })
      .def(py::self == py::self);
  m.def("init_params",
        [](std::size_t layers, std::size_t clusters, std::uint64_t seed) {
          return sp::init_params({sp::kFeatureDim, layers, clusters}, seed);
        },
        py::arg("layers") = 2, py::arg("clusters") = 3, py::arg("seed") = 0);

  m.def("fit_model",
        [](const std::vector<sp::LabeledSample>& samples, const sp::TrainConfig& config,
           std::size_t layers, std::size_t clusters) {
          auto r = sp::fit_model(samples, config, {sp::kFeatureDim, layers, clusters});
          std::vector<std::pair<double, double>> history;
          for (const auto& e : r.history.epochs) history.emplace_back(e.mean_loss, e.accuracy);
          return py::make_tuple(std::move(r.params), history, r.edge_accuracy);
        },
        py::arg("samples"), py::arg("config") = sp::TrainConfig{}, py::arg("layers") = 2,
        py::arg("clusters") = 3,
        "Fit edge scorer and GNN; returns (params, [(loss, accuracy)], edge_accuracy).");
  m.def("evaluate",
        [](const std::vector<sp::LabeledSample>& samples, const sp::ModelParams& params) {
          const auto graphs = sp::prepare_graphs(samples, params, {});
          const auto ev = sp::evaluate(graphs, params);
          py::dict d;
          d["accuracy"] = ev.accuracy;
          d["nodes"] = ev.nodes;
          d["confusion"] = ev.confusion;
          d["precision"] = ev.precision;
          d["recall"] = ev.recall;
          return d;
        },
        py::arg("samples"), py::arg("params"));

  m.def("score_face",
        [](const std::vector<sp::Detection>& d, const sp::ModelParams& p,
           const std::map<std::string, double>& part_weights,
           const std::map<int, double>& cluster_weights) {
          sp::WeightTable w(p.num_clusters());
          for (const auto& [label, x] : part_weights) {
            w.set_part_weight(sp::class_lookup(label).label, x);
          }
          for (const auto& [j, x] : cluster_weights) w.set_cluster_weight(j, x);
          return report_dict(sp::score_face(d, p, w));
        },
        py::arg("detections"), py::arg("params"),
        py::arg("part_weights") = std::map<std::string, double>{},
        py::arg("cluster_weights") = std::map<int, double>{});
  m.def("track_tps",
        [](const std::vector<sp::Frame>& frames, const sp::ModelParams& p) {
          std::vector<std::tuple<std::int64_t, double, std::size_t>> out;
          for (const auto& e : sp::track_tps(frames, p, sp::WeightTable(p.num_clusters())).entries) {
            out.emplace_back(e.timestamp, e.nps_normalized, e.expressions);
          }
          return out;
        },
        py::arg("frames"), py::arg("params"),
        "[(timestamp, nps / 100, expressions)] per frame.");

  m.def("checkpoint_to_string",
        [](const sp::ModelParams& p, const sp::TrainConfig& c) {
          return sp::checkpoint_to_string({p, c});
        },
        py::arg("params"), py::arg("config") = sp::TrainConfig{});
  m.def("checkpoint_from_string", [](const std::string& text) {
    auto c = sp::checkpoint_from_string(text);
    return py::make_tuple(std::move(c.params), c.config);
  });

  m.def("gradient_check",
        [](std::size_t trials, std::uint64_t seed, double step) {
          sp::GradCheckOptions o;
          o.trials = trials;
          o.seed = seed;
          o.step = step;
          const auto r = sp::run_gradient_check(o);
          py::dict d;
          d["max_relative_error"] = r.max_relative_error;
          d["checked"] = r.checked;
          d["skipped"] = r.skipped;
          d["trials"] = r.trials;
          d["passed"] = r.passed();
          return d;
        },
        py::arg("trials") = 20, py::arg("seed") = 7, py::arg("step") = 1e-5);
  m.def("parse_graph_oracle",
        [](std::size_t trials, std::uint64_t seed) {
          sp::OracleOptions o;
          o.trials = trials;
          o.seed = seed;
          const auto r = sp::run_parse_graph_oracle(o);
          return py::make_tuple(r.instances, r.mismatches);
        },
        py::arg("trials") = 100, py::arg("seed") = 11,
        "(instances, mismatches) of threshold inference against enumeration.");
}
