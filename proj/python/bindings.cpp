#include "dictmon/coding.hpp"
#include "dictmon/detect.hpp"
#include "dictmon/dictionary.hpp"
#include "dictmon/error.hpp"
#include "dictmon/ingest.hpp"
#include "dictmon/learning.hpp"
#include "dictmon/metrics.hpp"
#include "dictmon/synth.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace dictmon;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1)
    throw py::value_error("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SignalSegment segment_from(const Array& samples, std::int64_t timestamp) {
  SignalSegment s;
  s.samples = to_vector(samples);
  s.timestamp = timestamp;
  s.sample_rate = 12800.0;
  s.raw_rms = rms(s.samples);
  return s;
}

CodingConfig coding_config(const std::string& algorithm, double sparsity,
                           std::optional<std::size_t> instances) {
  CodingConfig c;
  c.algorithm = parse_algorithm(algorithm);
  c.sparsity = sparsity;
  c.instance_count = instances;
  return c;
}

LearnConfig learn_config(double eta, double noise_var) {
  LearnConfig l;
  l.eta = eta;
  l.noise_var = noise_var;
  return l;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shift-invariant dictionary learning for condition monitoring";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<IoError>(m, "IoError", data.ptr());
  py::register_exception<ParseError>(m, "ParseError", data.ptr());
  py::register_exception<FormatError>(m, "FormatError", data.ptr());
  (void)config;

  py::class_<Atom>(m, "Atom")
      .def(py::init([](int id, const Array& w) { return Atom{id, to_vector(w)}; }), py::arg("id"),
           py::arg("waveform"))
      .def_readwrite("id", &Atom::id)
      .def_property_readonly("waveform", [](const Atom& a) { return to_array(a.waveform); })
      .def("__len__", &Atom::size)
      .def("__repr__", [](const Atom& a) {
        return "<Atom id=" + std::to_string(a.id) + " length=" + std::to_string(a.size()) + ">";
      });

  py::class_<Dictionary>(m, "Dictionary")
      .def(py::init([](const std::vector<Atom>& atoms) {
             Dictionary d;
             d.atoms = atoms;
             return d;
           }),
           py::arg("atoms"))
      .def_readonly("atoms", &Dictionary::atoms)
      .def_readonly("generation", &Dictionary::generation)
      .def("__len__", &Dictionary::size)
      .def("__eq__", [](const Dictionary& a, const Dictionary& b) { return a == b; })
      .def("save", [](const Dictionary& d, const std::filesystem::path& p) { save_dictionary(d, p); })
      .def_static("load", &load_dictionary, py::arg("path"));

  m.def("init_pseudorandom", &init_pseudorandom, py::arg("atoms") = 8, py::arg("core_len") = 50,
        py::arg("pad") = 10, py::arg("seed") = 1);

  m.def("preprocess",
        [](const Array& x) { return to_array(preprocess(segment_from(x, 0)).samples); },
        py::arg("samples"), "Zero mean, unit variance copy of a segment.");

  m.def("instance_budget",
        [](std::size_t length, double sparsity) {
          CodingConfig c;
          c.sparsity = sparsity;
          return instance_budget(c, length);
        },
        py::arg("length"), py::arg("sparsity") = 0.9);

  m.def("encode",
        [](const Array& segment, const Dictionary& d, const std::string& algorithm, double sparsity,
           std::optional<std::size_t> instances) {
          const auto s = to_vector(segment);
          const SparseCode code = encode(s, d, coding_config(algorithm, sparsity, instances));
          py::list inst;
          for (const auto& i : code.instances)
            inst.append(py::make_tuple(i.atom_id, i.offset, i.amplitude));
          py::dict out;
          out["instances"] = inst;
          out["residual"] = to_array(code.residual);
          out["fidelity_db"] = fidelity_db(code, s);
          out["exhausted"] = code.exhausted;
          return out;
        },
        py::arg("segment"), py::arg("dictionary"), py::arg("algorithm") = "mp",
        py::arg("sparsity") = 0.9, py::arg("instances") = py::none(),
        "Sparse code of one segment: (atom_id, offset, amplitude) tuples and the residual.");

  m.def("train",
        [](const std::vector<Array>& blocks, const Dictionary& init, double eta,
           const std::string& algorithm, double sparsity, double noise_var,
           const std::function<void(std::size_t, double)>& observer) {
          std::vector<SignalSegment> segs;
          segs.reserve(blocks.size());
          for (std::size_t i = 0; i < blocks.size(); ++i)
            segs.push_back(segment_from(blocks[i], static_cast<std::int64_t>(i)));
          py::gil_scoped_release release;
          TrainObserver obs;
          if (observer)
            obs = [&observer](std::size_t b, double f) {
              py::gil_scoped_acquire acquire;
              observer(b, f);
            };
          return train_baseline(segs, init, coding_config(algorithm, sparsity, std::nullopt),
                                learn_config(eta, noise_var), obs);
        },
        py::arg("blocks"), py::arg("init"), py::arg("eta") = 1e-6, py::arg("algorithm") = "mp",
        py::arg("sparsity") = 0.9, py::arg("noise_var") = 1.0, py::arg("observer") = nullptr,
        "Learn a baseline from preprocessed blocks.");

  py::class_<HistoryRecord>(m, "HistoryRecord")
      .def_readonly("timestamp", &HistoryRecord::timestamp)
      .def_readonly("fidelity_db", &HistoryRecord::fidelity_db)
      .def_readonly("distance_deg", &HistoryRecord::distance_deg)
      .def_readonly("n_instances", &HistoryRecord::n_instances);

  py::class_<MonitorState>(m, "Monitor")
      .def(py::init([](const Dictionary& baseline, double eta, const std::string& algorithm,
                       double sparsity) {
             return MonitorState(baseline, coding_config(algorithm, sparsity, std::nullopt),
                                 learn_config(eta, 1.0));
           }),
           py::arg("baseline"), py::arg("eta") = 1e-6, py::arg("algorithm") = "mp",
           py::arg("sparsity") = 0.9)
      .def("propagate",
           [](MonitorState& st, const Array& segment, std::int64_t timestamp) {
             return st.propagate(segment_from(segment, timestamp));
           },
           py::arg("segment"), py::arg("timestamp"))
      .def_property_readonly("dictionary", &MonitorState::dictionary)
      .def_property_readonly("baseline", &MonitorState::baseline)
      .def_property_readonly("history", &MonitorState::history);

  m.def("dictionary_distance", &dictionary_distance, py::arg("a"), py::arg("b"));
  m.def("atom_coherence",
        [](const Dictionary& d, const Array& w) { return atom_coherence(d, Atom{-1, to_vector(w)}); },
        py::arg("dictionary"), py::arg("waveform"));

  m.def("mad_scores",
        [](const std::vector<double>& values) {
          std::vector<IndicatorSeries> pop;
          for (std::size_t i = 0; i < values.size(); ++i)
            pop.push_back({std::to_string(i), IndicatorKind::distance_deg, {{0, values[i]}}});
          std::vector<double> out;
          for (const auto& s : mad_scores(pop, 0))
            out.push_back(s.score);
          return out;
        },
        py::arg("values"), "Robust z-scores |x - median| / MAD of one population snapshot.");

  m.def("roc_auc",
        [](const std::vector<double>& scores, const std::vector<bool>& faulty) {
          if (scores.size() != faulty.size())
            throw py::value_error("scores and labels differ in length");
          std::vector<ScoredSample> samples;
          std::vector<LabeledWindow> labels;
          for (std::size_t i = 0; i < scores.size(); ++i) {
            const auto t = static_cast<std::int64_t>(i);
            samples.push_back({"m", t, scores[i]});
            labels.push_back({"m", t, t + 1, faulty[i] ? Label::faulty : Label::healthy});
          }
          return roc_curve(samples, labels).auc;
        },
        py::arg("scores"), py::arg("faulty"));

  m.def("planted_atoms", [] {
    std::vector<Array> out;
    for (const auto& w : default_planted_atoms())
      out.push_back(to_array(w));
    return out;
  });

  m.def("synth_segments",
        [](std::size_t count, std::size_t length, std::uint64_t seed, double noise_std,
           std::optional<double> fault_impulse_amp) {
          SynthSpec s;
          s.machine_id = "synthetic";
          s.planted_atoms = default_planted_atoms();
          s.noise_std = noise_std;
          s.seed = seed;
          if (fault_impulse_amp) {
            FaultSpec f;
            f.onset = 0;
            f.impulse_amp = *fault_impulse_amp;
            s.fault = f;
          }
          const auto fleet = generate_fleet({s}, count, length, 3600, 0);
          std::vector<Array> out;
          for (const auto& seg : fleet.segments[0])
            out.push_back(to_array(seg.samples));
          return out;
        },
        py::arg("count"), py::arg("length"), py::arg("seed") = 1, py::arg("noise_std") = 0.046,
        py::arg("fault_impulse_amp") = py::none(),
        "Planted-atom segments; with fault_impulse_amp every segment carries impulse bursts.");
}
