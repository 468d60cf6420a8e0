// python/bindings.cc

// Copyright 2026  EGRA Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the core operations.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include <json.hpp>

#include "egra/asr_baseline.h"
#include "egra/audio.h"
#include "egra/consensus.h"
#include "egra/corpus.h"
#include "egra/encoder.h"
#include "egra/experiments.h"
#include "egra/harness.h"
#include "egra/metrics.h"
#include "egra/report.h"
#include "egra/review.h"
#include "egra/stats.h"
#include "egra/synth.h"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(to_py(e));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

py::array_t<float> to_array(const std::vector<float>& v) {
  py::array_t<float> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

egra::Waveform waveform_from(py::array_t<float, py::array::c_style | py::array::forcecast> samples, int rate) {
  if (samples.ndim() != 1) throw egra::InvalidArgumentError("expected a 1-D sample array");
  egra::DecodedAudio a{{samples.data(), samples.data() + samples.size()}, rate, 1};
  return egra::canonicalize(a);
}

py::dict labeled_dict(const egra::LabeledRecording& r) {
  py::dict d;
  d["recording_id"] = r.recording_id;
  d["question"] = r.question_id;
  d["label"] = std::string(egra::to_string(r.label));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Consensus labeling, fine-tuning harness and evaluation for early-grade reading assessment";

  auto base = py::register_exception<egra::Error>(m, "EgraError", PyExc_RuntimeError);
  py::register_exception<egra::NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<egra::InvalidArgumentError>(m, "InvalidArgumentError", base.ptr());

  // corpus ------------------------------------------------------------------
  py::class_<egra::Corpus, std::shared_ptr<egra::Corpus>>(m, "Corpus")
      .def("__len__", &egra::Corpus::size)
      .def_property_readonly("label_count", &egra::Corpus::label_count)
      .def_property_readonly("question_ids",
                             [](const egra::Corpus& c) {
                               std::vector<std::string> ids;
                               for (const auto& q : c.questions()) ids.push_back(q.id);
                               return ids;
                             })
      .def("recording",
           [](const egra::Corpus& c, const std::string& id) {
             return to_py(json::parse(egra::manifest_line(c.recording(id))));
           })
      .def("recording_ids", [](const egra::Corpus& c) {
        std::vector<std::string> ids;
        for (const auto& r : c.recordings()) ids.push_back(r.id);
        return ids;
      });

  m.def("load_manifest", [](const std::filesystem::path& p) { return std::make_shared<egra::Corpus>(egra::load_manifest(p)); },
        py::arg("path"));
  m.def("open_corpus", [](const std::filesystem::path& p) {
    auto loc = egra::open_corpus(p);
    return py::make_tuple(std::make_shared<egra::Corpus>(std::move(loc.corpus)), loc.audio_root);
  }, py::arg("path"), "Corpus directory or manifest -> (corpus, audio_root)");
  m.def("write_manifest", &egra::write_manifest, py::arg("path"), py::arg("corpus"));
  m.def("summarize_distribution", [](const egra::Corpus& c) {
    auto s = egra::summarize_distribution(c);
    py::dict counts;
    for (const auto& [q, arr] : s.counts) {
      py::dict row;
      for (std::size_t i = 0; i < egra::kScenarioCount; ++i)
        row[py::str(std::string(egra::to_string(static_cast<egra::ScenarioClass>(i))))] = arr[i];
      counts[py::str(q)] = row;
    }
    return py::make_tuple(counts, s.excluded);
  });

  // synthetic data ------------------------------------------------------------
  m.def("synth_uniform_corpus", [](std::size_t per_stratum, double duration_s) {
    return std::make_shared<egra::Corpus>(egra::synth::make_uniform_corpus(per_stratum, duration_s));
  }, py::arg("per_stratum"), py::arg("duration_s") = 1.0);
  m.def("synth_released_corpus", [](double duration_s) {
    return std::make_shared<egra::Corpus>(egra::synth::make_corpus(egra::synth::released_counts(), duration_s));
  }, py::arg("duration_s") = 1.0);
  m.def("synth_write_audio", &egra::synth::write_tone_audio, py::arg("corpus"), py::arg("audio_root"),
        py::arg("seed") = 0);

  // audio -------------------------------------------------------------------------
  m.def("read_wav", [](const std::filesystem::path& p) {
    auto a = egra::read_wav(p);
    return py::make_tuple(to_array(a.samples), a.sample_rate_hz, a.channels);
  }, py::arg("path"), "-> (interleaved samples, rate, channels)");
  m.def("canonicalize", [](py::array_t<float, py::array::c_style | py::array::forcecast> samples, int rate) {
    return to_array(waveform_from(samples, rate).samples);
  }, py::arg("samples"), py::arg("sample_rate_hz"));
  m.def("spectrogram", [](py::array_t<float, py::array::c_style | py::array::forcecast> samples, double window_ms,
                          double hop_ms) {
    egra::Waveform w{{samples.data(), samples.data() + samples.size()}, egra::kCanonicalRateHz};
    auto s = egra::compute_spectrogram(w, window_ms, hop_ms);
    py::array_t<float> out({static_cast<py::ssize_t>(s.frames), static_cast<py::ssize_t>(s.bins)});
    std::copy(s.magnitudes.begin(), s.magnitudes.end(), out.mutable_data());
    return py::make_tuple(out, s.frame_step_s, s.bin_step_hz);
  }, py::arg("samples"), py::arg("window_ms") = 25.0, py::arg("hop_ms") = 10.0);

  // consensus -------------------------------------------------------------------------
  m.def("classify_scenario", [](const std::vector<std::string>& verdicts) {
    std::vector<egra::MarkerLabel> labels;
    for (std::size_t i = 0; i < verdicts.size(); ++i)
      labels.push_back({"m" + std::to_string(i + 1), egra::verdict_from_string(verdicts[i])});
    return std::string(egra::to_string(egra::classify_scenario(labels)));
  }, py::arg("verdicts"));
  m.def("apply_policy", [](const egra::Corpus& c, const std::string& policy) {
    auto kept = egra::apply_policy(c, egra::parse_policy(policy));
    py::list items;
    for (const auto& r : kept.items) items.append(labeled_dict(r));
    return py::make_tuple(items, kept.considered);
  }, py::arg("corpus"), py::arg("policy") = "consensus", "-> (retained items, fully labeled count)");
  m.def("sample_validation_set", &egra::sample_validation_set, py::arg("corpus"), py::arg("per_scenario") = 10,
        py::arg("seed") = 0);
  m.def("agreement_report", [](const egra::Corpus& c, const std::filesystem::path& judgments) {
    return to_py(egra::review::agreement_report(c, egra::read_judgments(judgments)).to_json());
  }, py::arg("corpus"), py::arg("judgments_path"));

  // experiments ----------------------------------------------------------------------
  m.def("plan_experiments", [](const egra::Corpus& c, const std::vector<std::string>& models,
                               const std::vector<std::size_t>& set_sizes, const std::string& grid,
                               std::size_t replicates, std::uint64_t seed) {
    egra::LabeledPool pool(egra::apply_policy(c, egra::ConsensusPolicy::kConsensus));
    egra::PlanOptions o;
    o.models = models;
    o.set_sizes = set_sizes;
    o.grid = egra::parse_grid(grid);
    o.n_replicates = replicates;
    o.base_seed = seed;
    std::vector<std::string> qs;
    for (const auto& q : c.questions()) qs.push_back(q.id);
    return to_py(egra::to_json(egra::plan_experiments(pool, qs, o)));
  }, py::arg("corpus"), py::arg("models"), py::arg("set_sizes") = std::vector<std::size_t>{1},
     py::arg("grid") = "full", py::arg("replicates") = 5, py::arg("seed") = 0);
  m.def("make_question_sets", &egra::make_question_sets, py::arg("questions"), py::arg("set_size"),
        py::arg("seed") = 0);

  // harness ----------------------------------------------------------------------------
  py::class_<egra::Classifier, std::shared_ptr<egra::Classifier>>(m, "Classifier")
      .def("predict", [](const egra::Classifier& c, py::array_t<float, py::array::c_style | py::array::forcecast> s,
                         int rate) {
        auto p = c.predict(waveform_from(s, rate));
        py::dict d;
        d["question"] = p.question_id;
        d["verdict"] = std::string(egra::to_string(p.verdict));
        d["class_index"] = p.class_index;
        d["probabilities"] = p.probabilities;
        return d;
      }, py::arg("samples"), py::arg("sample_rate_hz") = egra::kCanonicalRateHz)
      .def("save", [](const egra::Classifier& c, const std::filesystem::path& dir) { egra::save_classifier(c, dir); })
      .def_property_readonly("questions", [](const egra::Classifier& c) { return c.labels().questions(); });
  m.def("load_classifier", [](const std::filesystem::path& dir) {
    return std::make_shared<egra::Classifier>(egra::load_classifier(dir));
  });
  m.def("fine_tune", [](const py::list& examples, const std::vector<std::string>& questions, const std::string& model,
                        double lr, std::size_t steps, std::size_t batch_size, std::size_t grad_accumulation,
                        std::uint64_t seed) {
    std::vector<egra::TrainExample> train;
    for (const auto& item : examples) {
      auto t = item.cast<py::tuple>();
      if (t.size() != 4) throw egra::InvalidArgumentError("examples are (samples, rate, question, verdict) tuples");
      train.push_back({"py" + std::to_string(train.size()), t[2].cast<std::string>(),
                       egra::verdict_from_string(t[3].cast<std::string>()),
                       waveform_from(t[0].cast<py::array_t<float, py::array::c_style | py::array::forcecast>>(),
                                     t[1].cast<int>())});
    }
    egra::TrainHyperparams hp;
    hp.learning_rate = lr;
    hp.total_steps = steps;
    hp.batch_size = batch_size;
    hp.grad_accumulation = grad_accumulation;
    auto encoder = egra::make_encoder(model, seed);
    std::optional<egra::FineTuneResult> result;
    {
      py::gil_scoped_release release;
      result.emplace(egra::fine_tune(*encoder, train, egra::LabelSpace(questions), hp, seed));
    }
    py::dict log;
    log["initial_loss"] = result->log.initial_loss;
    log["final_loss"] = result->log.final_loss;
    log["step_loss"] = result->log.step_loss;
    return py::make_tuple(std::make_shared<egra::Classifier>(std::move(result->classifier)), log);
  }, py::arg("examples"), py::arg("questions"), py::arg("model") = "tiny", py::arg("learning_rate") = 3e-5,
     py::arg("steps") = 1000, py::arg("batch_size") = 4, py::arg("grad_accumulation") = 2, py::arg("seed") = 0,
     "examples: list of (samples, sample_rate_hz, question, verdict)");

  // metrics -----------------------------------------------------------------------------
  m.def("rates", [](std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
    auto r = egra::rates({tp, tn, fp, fn});
    py::dict d;
    d["de"] = r.de;
    d["fpr"] = r.fpr;
    d["fnr"] = r.fnr;
    return d;
  }, py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));
  m.def("confusion", [](const std::map<std::string, std::pair<std::string, std::string>>& predictions,
                        const std::map<std::string, std::pair<std::string, std::string>>& truth,
                        const std::string& question) {
    auto convert = [](const auto& in) {
      std::map<std::string, egra::ClassLabel> out;
      for (const auto& [id, qv] : in) out[id] = {qv.first, egra::verdict_from_string(qv.second)};
      return out;
    };
    auto cm = egra::confusion(convert(predictions), convert(truth), question);
    py::dict d;
    d["tp"] = cm.tp;
    d["tn"] = cm.tn;
    d["fp"] = cm.fp;
    d["fn"] = cm.fn;
    return d;
  }, py::arg("predictions"), py::arg("ground_truth"), py::arg("question"),
     "maps recording id -> (question, verdict)");
  m.def("welch_test", [](const std::vector<double>& a, const std::vector<double>& b) {
    auto w = egra::stats::welch_test(a, b);
    return py::make_tuple(w.t, w.df, w.p);
  }, py::arg("a"), py::arg("b"), "-> (t, df, two-sided p)");
  m.def("rank_top_k_csv", [](const std::filesystem::path& results, std::size_t k) {
    auto samples = egra::read_samples(results);
    return egra::report::top_k_csv(egra::rank_top_k(egra::aggregate(samples), k));
  }, py::arg("results_path"), py::arg("k") = 5);

  // baseline ------------------------------------------------------------------------------
  m.def("normalize_transcript", &egra::normalize_transcript, py::arg("text"));
  m.def("exact_match_accuracy", [](const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<egra::TranscriptRecord> recs;
    for (const auto& [expected, got] : pairs) recs.push_back({"", expected, got});
    auto r = egra::exact_match_accuracy(recs);
    py::dict per;
    for (const auto& q : r.per_question) per[py::str(q.expected_text)] = py::make_tuple(q.samples, q.correct, q.accuracy());
    return py::make_tuple(per, r.overall());
  }, py::arg("pairs"), "pairs of (expected text, transcript)");

}
