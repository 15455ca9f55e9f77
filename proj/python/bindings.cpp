#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mstool/backfit.hpp"
#include "mstool/eeg_io.hpp"
#include "mstool/error.hpp"
#include "mstool/evalmetrics.hpp"
#include "mstool/features.hpp"
#include "mstool/microstate.hpp"
#include "mstool/pipeline_io.hpp"
#include "mstool/preprocess.hpp"
#include "mstool/promptgen.hpp"
#include "mstool/synthquality.hpp"

namespace py = pybind11;
using namespace mstool;

namespace {

template <class J>
py::object to_py(const J& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = MSTOOL_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::enum_<Condition>(m, "Condition").value("Rest", Condition::Rest).value("Load", Condition::Load);
  py::enum_<Gender>(m, "Gender").value("male", Gender::male).value("female", Gender::female);

  py::class_<SubjectMeta>(m, "SubjectMeta")
      .def(py::init<>())
      .def_readwrite("subject_id", &SubjectMeta::subject_id)
      .def_readwrite("age", &SubjectMeta::age)
      .def_readwrite("gender", &SubjectMeta::gender)
      .def_readwrite("arithmetic_score", &SubjectMeta::arithmetic_score)
      .def_readwrite("condition", &SubjectMeta::condition);

  py::class_<EegRecording>(m, "EegRecording")
      .def(py::init<>())
      .def_readwrite("channel_labels", &EegRecording::channel_labels)
      .def_readwrite("sampling_rate_hz", &EegRecording::sampling_rate_hz)
      .def_readwrite("data", &EegRecording::data)
      .def_readwrite("meta", &EegRecording::meta)
      .def_property_readonly("duration_s", &EegRecording::duration_s)
      .def("validate", &EegRecording::validate);

  m.def("load_recording", py::overload_cast<const std::filesystem::path&>(&load_recording), py::arg("path"));
  m.def(
      "save_recording",
      [](const EegRecording& rec, const std::filesystem::path& path, const std::string& format) {
        save_recording(rec, path, format.empty() ? format_from_extension(path) : parse_format(format));
      },
      py::arg("recording"), py::arg("path"), py::arg("format") = "");

  m.def(
      "bandpass",
      [](const EegRecording& rec, double low_hz, double high_hz, int order) {
        FilterSpec spec;
        spec.low_hz = low_hz;
        spec.high_hz = high_hz;
        spec.order = order;
        return bandpass(rec, spec);
      },
      py::arg("recording"), py::arg("low_hz") = FilterSpec{}.low_hz, py::arg("high_hz") = FilterSpec{}.high_hz,
      py::arg("order") = FilterSpec{}.order);
  m.def(
      "rereference", [](const EegRecording& rec, const std::string& ref) { return rereference(rec, Reference::parse(ref)); },
      py::arg("recording"), py::arg("reference") = "average");

  m.def("gfp", py::overload_cast<const Eigen::MatrixXd&>(&gfp), py::arg("data"));
  m.def(
      "find_gfp_peaks",
      [](const Eigen::VectorXd& values, double fs, double min_distance_ms) {
        return find_gfp_peaks(GfpSeries{values, fs}, min_distance_ms);
      },
      py::arg("gfp"), py::arg("sampling_rate_hz"), py::arg("min_distance_ms") = 0.0);

  py::class_<MicrostateModel>(m, "MicrostateModel")
      .def_property_readonly("maps", &MicrostateModel::map_matrix)
      .def_readonly("labels", &MicrostateModel::labels)
      .def_readonly("channel_labels", &MicrostateModel::channel_labels)
      .def_readonly("gev_total", &MicrostateModel::gev_total)
      .def_property_readonly("k", &MicrostateModel::k)
      .def("to_dict", [](const MicrostateModel& model) { return to_py(to_json(model)); });

  m.def(
      "mod_kmeans",
      [](const Eigen::MatrixXd& samples, std::size_t k, int n_init, int max_iter, double tol, std::uint64_t seed) {
        ModKMeansOptions o;
        o.k = k;
        o.n_init = n_init;
        o.max_iter = max_iter;
        o.tol = tol;
        o.seed = seed;
        py::gil_scoped_release nogil;
        return mod_kmeans(samples, o);
      },
      py::arg("samples"), py::arg("k") = 4, py::arg("n_init") = 10, py::arg("max_iter") = 300, py::arg("tol") = 1e-6,
      py::arg("seed") = 0);
  m.def("order_maps", py::overload_cast<const MicrostateModel&, const Eigen::MatrixXd&>(&order_maps), py::arg("model"),
        py::arg("data"));

  py::class_<LabelSequence>(m, "LabelSequence")
      .def_readonly("labels", &LabelSequence::labels)
      .def_readonly("corr", &LabelSequence::corr)
      .def_readonly("sampling_rate_hz", &LabelSequence::sampling_rate_hz)
      .def_readonly("state_corr", &LabelSequence::state_corr)
      .def("__len__", &LabelSequence::size);

  m.def("backfit", py::overload_cast<const Eigen::MatrixXd&, const MicrostateModel&, double>(&backfit), py::arg("data"),
        py::arg("model"), py::arg("sampling_rate_hz"));
  m.def("smooth_labels", &smooth_labels, py::arg("sequence"), py::arg("min_duration_ms"));
  m.def(
      "gev",
      [](const Eigen::MatrixXd& data, const MicrostateModel& model, const std::vector<int>& labels) {
        GevReport r = gev(data, model, labels);
        return py::make_tuple(r.per_state, r.total);
      },
      py::arg("data"), py::arg("model"), py::arg("labels"));

  m.def(
      "extract_features",
      [](const EegRecording& rec, const MicrostateModel& model, const LabelSequence& seq) {
        return to_py(to_json(extract_features(rec, model, seq)));
      },
      py::arg("recording"), py::arg("model"), py::arg("sequence"));
  m.def(
      "render_prompt",
      [](const py::dict& features) {
        std::string text = py::str(py::module_::import("json").attr("dumps")(features));
        PromptRecord r = render_prompt(feature_table_from_json(nlohmann::json::parse(text)));
        py::dict out;
        out["user"] = r.user;
        out["description"] = r.description;
        out["query"] = r.query;
        out["answer"] = r.answer;
        return out;
      },
      py::arg("features"));

  m.def("js_distance", py::overload_cast<const std::vector<double>&, const std::vector<double>&>(&js_distance),
        py::arg("p"), py::arg("q"));
  m.def("composite_score", &composite_score, py::arg("components"),
        py::arg("weights") = std::array<double, 3>{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  m.def(
      "score_quality",
      [](const std::filesystem::path& orig, const std::filesystem::path& synth, int bins, double variance_threshold) {
        QualityOptions o;
        o.bins = bins;
        o.variance_threshold = variance_threshold;
        return to_py(to_json(score_quality(read_table_csv(orig), read_table_csv(synth), o)));
      },
      py::arg("original"), py::arg("synthetic"), py::arg("bins") = 20, py::arg("variance_threshold") = 0.95);

  m.def(
      "metrics",
      [](std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
        return to_py(to_json(metrics(ConfusionCounts{tp, fp, tn, fn})));
      },
      py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));
}
