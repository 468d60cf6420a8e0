// include/egra/synth.h

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

#ifndef EGRA_SYNTH_H_
#define EGRA_SYNTH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "egra/audio.h"
#include "egra/consensus.h"
#include "egra/corpus.h"
#include "egra/rng.h"

// Synthetic corpora and audio for demos, tests and desk-scale acceptance runs.
namespace egra::synth {

using ScenarioCounts = std::array<std::size_t, kScenarioCount>;

/// Corpus over the standard questions with exactly `counts[q][s]` recordings
/// per (question, scenario). Ids are "<question>-<scenario index>-<n>"; the
/// dissenting marker rotates across m1..m3.
Corpus make_corpus(const std::map<std::string, ScenarioCounts>& counts, double duration_s = 4.0);

/// Same number of recordings in every (question, scenario) stratum.
Corpus make_uniform_corpus(std::size_t per_stratum, double duration_s = 4.0);

/// Per-question counts whose totals match the released labeling: 14,971
/// recordings, 12,747 unanimous, 1,488 mostly-correct, 736 mostly-incorrect.
/// AllCorrect per question equals the baseline transcription sample counts.
std::map<std::string, ScenarioCounts> released_counts();

/// Expert verdicts for a validation set. In scenario stratum s the expert
/// agrees with the majority verdict on the first agreements_per_scenario[s]
/// recordings (validation-set order) and contradicts it on the rest.
std::vector<ExpertJudgment> judgments_with_agreement(
    const Corpus& corpus, const std::vector<std::string>& validation_set,
    const ScenarioCounts& agreements_per_scenario);

struct ToneSpec {
  double frequency_hz = 440.0;
  double duration_s = 1.0;
  double amplitude = 0.5;
  double noise_amplitude = 0.0;
};

/// Sine tone plus white noise at the canonical rate, random phase.
std::vector<float> tone(const ToneSpec& spec, Rng& rng, int sample_rate_hz = kCanonicalRateHz);

/// Tone frequency used by write_tone_audio for a (question, verdict) pair.
double tone_frequency(std::size_t question_index, Verdict verdict);

/// Writes a PCM16 WAV for every recording under `audio_root`, with a tone
/// whose frequency encodes the question and its consensus/majority verdict.
void write_tone_audio(const Corpus& corpus, const std::filesystem::path& audio_root,
                      std::uint64_t seed);

}  // namespace egra::synth

#endif  // EGRA_SYNTH_H_
