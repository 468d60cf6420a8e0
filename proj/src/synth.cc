// src/synth.cc

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

#include "egra/synth.h"

#include <cmath>

namespace egra::synth {

namespace {

std::vector<MarkerLabel> labels_for(ScenarioClass scenario, std::size_t rotation) {
  const auto incorrect = static_cast<std::size_t>(scenario);
  // Majority verdict everywhere except the dissenting slot(s).
  std::vector<MarkerLabel> labels(kMarkersPerRecording);
  for (std::size_t m = 0; m < kMarkersPerRecording; ++m) {
    labels[m].marker_id = "m" + std::to_string(m + 1);
    // place `incorrect` incorrect verdicts starting at the rotation offset
    std::size_t slot = (m + kMarkersPerRecording - rotation % kMarkersPerRecording) % kMarkersPerRecording;
    labels[m].verdict = slot < incorrect ? Verdict::kIncorrect : Verdict::kCorrect;
  }
  return labels;
}

}  // namespace

Corpus make_corpus(const std::map<std::string, ScenarioCounts>& counts, double duration_s) {
  std::vector<Recording> recordings;
  for (const auto& q : standard_questions()) {
    auto it = counts.find(q.id);
    if (it == counts.end()) continue;
    for (std::size_t s = 0; s < kScenarioCount; ++s) {
      for (std::size_t n = 0; n < it->second[s]; ++n) {
        Recording r;
        r.id = q.id + "-" + std::to_string(s) + "-" + std::to_string(n);
        r.question_id = q.id;
        r.audio_path = r.id + ".wav";
        r.duration_s = duration_s;
        r.sample_rate_hz = kCanonicalRateHz;
        r.labels = labels_for(static_cast<ScenarioClass>(s), n);
        recordings.push_back(std::move(r));
      }
    }
  }
  return Corpus(standard_questions(), std::move(recordings));
}

Corpus make_uniform_corpus(std::size_t per_stratum, double duration_s) {
  std::map<std::string, ScenarioCounts> counts;
  for (const auto& q : standard_questions())
    counts[q.id] = {per_stratum, per_stratum, per_stratum, per_stratum};
  return make_corpus(counts, duration_s);
}

std::map<std::string, ScenarioCounts> released_counts() {
  // AllCorrect per question = consensus-correct samples fed to the baseline.
  const std::map<std::string, std::size_t> all_correct = {
      {"d", 503},  {"ewe", 689},  {"hayi", 688}, {"hl", 423}, {"v", 796},
      {"n", 1139}, {"molo", 709}, {"kude", 557}, {"ng", 538}, {"inja", 691}};
  constexpr std::size_t kAllIncorrect = 12747 - 6733;
  constexpr std::size_t kMostlyCorrect = 1488;
  constexpr std::size_t kMostlyIncorrect = 736;

  std::map<std::string, ScenarioCounts> counts;
  const auto& qs = standard_questions();
  auto share = [&](std::size_t total, std::size_t i) {
    return total / qs.size() + (i < total % qs.size() ? 1 : 0);
  };
  for (std::size_t i = 0; i < qs.size(); ++i) {
    counts[qs[i].id] = {all_correct.at(qs[i].id), share(kMostlyCorrect, i),
                        share(kMostlyIncorrect, i), share(kAllIncorrect, i)};
  }
  return counts;
}

std::vector<ExpertJudgment> judgments_with_agreement(
    const Corpus& corpus, const std::vector<std::string>& validation_set,
    const ScenarioCounts& agreements_per_scenario) {
  ScenarioCounts used{};
  std::vector<ExpertJudgment> out;
  out.reserve(validation_set.size());
  for (const auto& id : validation_set) {
    const Recording& r = corpus.recording(id);
    auto scenario = classify_scenario(r.labels);
    auto s = static_cast<std::size_t>(scenario);
    Verdict majority = s <= 1 ? Verdict::kCorrect : Verdict::kIncorrect;
    Verdict flipped = majority == Verdict::kCorrect ? Verdict::kIncorrect : Verdict::kCorrect;
    bool agree = used[s] < agreements_per_scenario[s];
    if (agree) ++used[s];
    out.push_back({id, agree ? majority : flipped, "2024-01-01T00:00:00Z"});
  }
  return out;
}

std::vector<float> tone(const ToneSpec& spec, Rng& rng, int sample_rate_hz) {
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate_hz));
  const double phase = 2.0 * M_PI * rng.uniform();
  const double step = 2.0 * M_PI * spec.frequency_hz / sample_rate_hz;
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double noise = spec.noise_amplitude * (2.0 * rng.uniform() - 1.0);
    out[i] = static_cast<float>(spec.amplitude * std::sin(phase + step * static_cast<double>(i)) + noise);
  }
  return out;
}

double tone_frequency(std::size_t question_index, Verdict verdict) {
  return 300.0 + 350.0 * static_cast<double>(question_index) +
         (verdict == Verdict::kIncorrect ? 175.0 : 0.0);
}

void write_tone_audio(const Corpus& corpus, const std::filesystem::path& audio_root,
                      std::uint64_t seed) {
  std::filesystem::create_directories(audio_root);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.questions().size(); ++i) index[corpus.questions()[i].id] = i;
  for (const auto& r : corpus.recordings()) {
    Rng rng(SeedHasher(seed).add(r.id).finish());
    std::size_t incorrect = 0;
    for (const auto& l : r.labels) incorrect += l.verdict == Verdict::kIncorrect;
    Verdict majority = 2 * incorrect > r.labels.size() ? Verdict::kIncorrect : Verdict::kCorrect;
    ToneSpec spec;
    spec.frequency_hz = tone_frequency(index.at(r.question_id), majority);
    spec.duration_s = r.duration_s;
    spec.amplitude = 0.3 + 0.4 * rng.uniform();
    spec.noise_amplitude = 0.05;
    auto samples = tone(spec, rng, r.sample_rate_hz);
    auto path = audio_root / r.audio_path;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_wav(path, samples, r.sample_rate_hz, 1);
  }
}

}  // namespace egra::synth
