// include/egra/harness.h

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

#ifndef EGRA_HARNESS_H_
#define EGRA_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egra/common.h"
#include "egra/encoder.h"
#include "egra/nn.h"

namespace egra {

/// Output classes question x {correct, incorrect}; 2Q classes, binary for Q=1.
/// Class 2i is (question i, correct), class 2i+1 is (question i, incorrect).
class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> question_set);

  std::size_t size() const { return 2 * questions_.size(); }
  std::size_t encode(const std::string& question, Verdict verdict) const;
  std::pair<std::string, Verdict> decode(std::size_t index) const;
  const std::vector<std::string>& questions() const { return questions_; }

 private:
  std::vector<std::string> questions_;
};

struct TrainHyperparams {
  double learning_rate = 3e-5;
  std::size_t total_steps = 1000;
  std::size_t batch_size = 4;
  std::size_t grad_accumulation = 2;

  std::size_t effective_batch() const { return batch_size * grad_accumulation; }
  void validate() const;
};

struct HeadConfig {
  std::vector<int> hidden = {64, 32};
};

struct TrainExample {
  std::string recording_id;
  std::string question_id;
  Verdict label = Verdict::kCorrect;
  Waveform waveform;
};

struct Prediction {
  std::size_t class_index = 0;
  std::string question_id;
  Verdict verdict = Verdict::kCorrect;
  std::vector<double> probabilities;
};

/// A fine-tuned backbone plus head. Evaluation is const and deterministic,
/// so one instance may serve concurrent predict() callers.
class Classifier {
 public:
  Classifier(std::unique_ptr<SpeechEncoder> encoder, nn::ClassifierHead head, LabelSpace labels,
             TrainHyperparams hparams, std::uint64_t seed);

  Prediction predict(const Waveform& waveform) const;
  /// Logits for already-featurized input.
  nn::RowVector logits(const nn::Matrix& features) const;

  const SpeechEncoder& encoder() const { return *encoder_; }
  SpeechEncoder& encoder() { return *encoder_; }
  const nn::ClassifierHead& head() const { return head_; }
  nn::ClassifierHead& head() { return head_; }
  const LabelSpace& labels() const { return labels_; }
  const TrainHyperparams& hparams() const { return hparams_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::unique_ptr<SpeechEncoder> encoder_;
  nn::ClassifierHead head_;
  LabelSpace labels_;
  TrainHyperparams hparams_;
  std::uint64_t seed_ = 0;
};

inline Prediction predict(const Classifier& classifier, const Waveform& waveform) {
  return classifier.predict(waveform);
}

struct TrainingLog {
  std::vector<double> step_loss;  // mean cross-entropy of each optimizer step's effective batch
  double initial_loss = 0.0;      // mean loss over the whole train set before the first step
  double final_loss = 0.0;        // same, after the last step
};

struct FineTuneResult {
  Classifier classifier;
  TrainingLog log;
};

/// Fine-tunes a copy of `encoder` together with a freshly initialized head.
/// Runs exactly hparams.total_steps Adam steps; each step averages the
/// cross-entropy gradient over grad_accumulation micro-batches of
/// batch_size examples. Data order and head init are drawn from `seed`.
FineTuneResult fine_tune(const SpeechEncoder& encoder, std::span<const TrainExample> train,
                         const LabelSpace& labels, const TrainHyperparams& hparams,
                         std::uint64_t seed, const HeadConfig& head = {});

/// Mean cross-entropy of `classifier` over `examples`.
double mean_loss(const Classifier& classifier, std::span<const TrainExample> examples);

void save_classifier(const Classifier& classifier, const std::filesystem::path& dir);
Classifier load_classifier(const std::filesystem::path& dir);

struct CostReport {
  std::string encoder_id;
  std::string hardware;
  std::size_t total_steps = 0;
  std::vector<double> train_seconds;  // one per run
  std::vector<double> infer_seconds;  // per recording, one per run

  double mean_train_seconds() const;
  double mean_infer_seconds() const;
};

/// Times a full fine-tune and single-recording inference `n_runs` times.
CostReport measure_cost(const SpeechEncoder& encoder, const TrainHyperparams& hparams,
                        std::span<const TrainExample> train, const Waveform& probe,
                        std::size_t n_runs = 10);

std::string describe_hardware();

}  // namespace egra

#endif  // EGRA_HARNESS_H_
