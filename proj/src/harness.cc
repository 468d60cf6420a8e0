// src/harness.cc

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

#include "egra/harness.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "egra/rng.h"

namespace egra {

using nlohmann::json;

LabelSpace::LabelSpace(std::vector<std::string> question_set) : questions_(std::move(question_set)) {
  if (questions_.empty()) throw InvalidArgumentError("label space needs at least one question");
  for (std::size_t i = 0; i < questions_.size(); ++i)
    for (std::size_t j = i + 1; j < questions_.size(); ++j)
      if (questions_[i] == questions_[j])
        throw InvalidArgumentError("duplicate question '" + questions_[i] + "' in label space");
}

std::size_t LabelSpace::encode(const std::string& question, Verdict verdict) const {
  for (std::size_t i = 0; i < questions_.size(); ++i)
    if (questions_[i] == question) return 2 * i + (verdict == Verdict::kIncorrect ? 1 : 0);
  throw InvalidArgumentError("question '" + question + "' is not in the label space");
}

std::pair<std::string, Verdict> LabelSpace::decode(std::size_t index) const {
  if (index >= size()) throw InvalidArgumentError("class index " + std::to_string(index) + " out of range");
  return {questions_[index / 2], index % 2 == 0 ? Verdict::kCorrect : Verdict::kIncorrect};
}

void TrainHyperparams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw InvalidArgumentError("learning rate must be positive");
  if (batch_size == 0 || grad_accumulation == 0)
    throw InvalidArgumentError("batch size and gradient accumulation must be positive");
}

Classifier::Classifier(std::unique_ptr<SpeechEncoder> encoder, nn::ClassifierHead head,
                       LabelSpace labels, TrainHyperparams hparams, std::uint64_t seed)
    : encoder_(std::move(encoder)),
      head_(std::move(head)),
      labels_(std::move(labels)),
      hparams_(hparams),
      seed_(seed) {
  if (!encoder_) throw InvalidArgumentError("classifier needs an encoder");
  if (static_cast<std::size_t>(head_.n_classes()) != labels_.size())
    throw InvalidArgumentError("head output size does not match the label space");
}

nn::RowVector Classifier::logits(const nn::Matrix& features) const {
  return head_.logits(encoder_->forward(features, nullptr));
}

Prediction Classifier::predict(const Waveform& waveform) const {
  nn::RowVector p = nn::softmax(logits(encoder_->featurize(waveform)));
  Prediction out;
  Eigen::Index best;
  p.maxCoeff(&best);
  out.class_index = static_cast<std::size_t>(best);
  std::tie(out.question_id, out.verdict) = labels_.decode(out.class_index);
  out.probabilities.assign(p.data(), p.data() + p.size());
  return out;
}

namespace {

struct Featurized {
  nn::Matrix features;
  std::size_t target;
};

std::vector<Featurized> featurize_all(const SpeechEncoder& encoder, std::span<const TrainExample> examples,
                                      const LabelSpace& labels) {
  std::vector<Featurized> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    try {
      out.push_back({encoder.featurize(ex.waveform), labels.encode(ex.question_id, ex.label)});
    } catch (const Error& e) {
      throw InvalidArgumentError("example '" + ex.recording_id + "': " + e.what());
    }
  }
  return out;
}

double mean_loss_featurized(const Classifier& c, const std::vector<Featurized>& data) {
  double total = 0.0;
  for (const auto& d : data) total += nn::cross_entropy(c.logits(d.features), d.target);
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

}  // namespace

FineTuneResult fine_tune(const SpeechEncoder& encoder, std::span<const TrainExample> train,
                         const LabelSpace& labels, const TrainHyperparams& hparams,
                         std::uint64_t seed, const HeadConfig& head_config) {
  hparams.validate();
  if (train.empty()) throw InvalidArgumentError("training set is empty");

  std::vector<Featurized> data = featurize_all(encoder, train, labels);
  std::vector<std::size_t> per_class(labels.size(), 0);
  for (const auto& d : data) ++per_class[d.target];
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c] == 0) {
      auto [q, v] = labels.decode(c);
      throw InvalidArgumentError("empty class (" + q + ", " + std::string(to_string(v)) +
                                 ") in training set");
    }
  }

  Rng head_rng(SeedHasher(seed).add("head-init").finish());
  nn::ClassifierHead head(encoder.frame_dim(), head_config.hidden, static_cast<int>(labels.size()), head_rng);
  Classifier classifier(encoder.clone(), std::move(head), labels, hparams, seed);

  std::vector<nn::Parameter*> params = classifier.encoder().parameters();
  for (auto* p : classifier.head().parameters()) params.push_back(p);

  TrainingLog log;
  log.initial_loss = mean_loss_featurized(classifier, data);
  log.step_loss.reserve(hparams.total_steps);

  Rng order_rng(SeedHasher(seed).add("data-order").finish());
  std::vector<std::size_t> order(data.size());
  std::size_t cursor = order.size();  // forces a shuffle on first use
  auto next_index = [&]() {
    if (cursor == order.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      order_rng.shuffle(order);
      cursor = 0;
    }
    return order[cursor++];
  };

  nn::Adam optimizer(hparams.learning_rate);
  const double scale = 1.0 / static_cast<double>(hparams.effective_batch());
  EncoderTape enc_tape;
  nn::ClassifierHead::Tape head_tape;
  for (std::size_t step = 0; step < hparams.total_steps; ++step) {
    for (auto* p : params) p->zero_grad();
    double step_loss = 0.0;
    for (std::size_t k = 0; k < hparams.effective_batch(); ++k) {
      const auto& d = data[next_index()];
      nn::Matrix frames = classifier.encoder().forward(d.features, &enc_tape);
      nn::RowVector logits = classifier.head().logits(frames, &head_tape);
      const double loss = nn::cross_entropy(logits, d.target);
      if (!std::isfinite(loss))
        throw Error("non-finite loss at step " + std::to_string(step) + " (example " +
                    train[&d - data.data()].recording_id + ")");
      step_loss += loss * scale;
      nn::RowVector grad = nn::softmax(logits);
      grad(static_cast<Eigen::Index>(d.target)) -= 1.0;
      grad *= scale;
      nn::Matrix grad_frames = classifier.head().backward(head_tape, grad);
      classifier.encoder().backward(enc_tape, grad_frames);
    }
    optimizer.step(params);
    log.step_loss.push_back(step_loss);
  }
  log.final_loss = mean_loss_featurized(classifier, data);
  return {std::move(classifier), std::move(log)};
}

double mean_loss(const Classifier& classifier, std::span<const TrainExample> examples) {
  return mean_loss_featurized(classifier, featurize_all(classifier.encoder(), examples, classifier.labels()));
}

namespace {

constexpr const char* kMetadataFile = "metadata.json";
constexpr const char* kWeightsFile = "weights.bin";

}  // namespace

void save_classifier(const Classifier& classifier, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  // parameters() is non-const on the encoder interface; copy to read them
  auto encoder = classifier.encoder().clone();
  nn::ClassifierHead head = classifier.head();
  std::vector<nn::Parameter*> params = encoder->parameters();
  for (auto* p : head.parameters()) params.push_back(p);

  json meta;
  meta["format"] = "egra-classifier/1";
  meta["backbone"] = classifier.encoder().id();
  meta["frame_dim"] = classifier.encoder().frame_dim();
  meta["seed"] = classifier.seed();
  meta["label_space"] = classifier.labels().questions();
  json classes = json::array();
  for (std::size_t c = 0; c < classifier.labels().size(); ++c) {
    auto [q, v] = classifier.labels().decode(c);
    classes.push_back({{"index", c}, {"question", q}, {"verdict", to_string(v)}});
  }
  meta["classes"] = classes;
  const auto& hp = classifier.hparams();
  meta["hparams"] = {{"learning_rate", hp.learning_rate},
                     {"total_steps", hp.total_steps},
                     {"batch_size", hp.batch_size},
                     {"grad_accumulation", hp.grad_accumulation}};
  meta["head"] = {{"pooling", "mean"}, {"hidden", head.hidden()}};

  std::ofstream weights(dir / kWeightsFile, std::ios::binary | std::ios::trunc);
  if (!weights) throw Error("cannot write " + (dir / kWeightsFile).string());
  json layout = json::array();
  std::size_t offset = 0;
  for (const auto* p : params) {
    layout.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}, {"offset", offset}});
    // column-major float64, little-endian hosts only
    weights.write(reinterpret_cast<const char*>(p->value.data()),
                  static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    offset += static_cast<std::size_t>(p->value.size());
  }
  meta["parameters"] = layout;
  std::ofstream(dir / kMetadataFile, std::ios::trunc) << meta.dump(2) << '\n';
}

Classifier load_classifier(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / kMetadataFile);
  if (!meta_in) throw NotFoundError("no classifier metadata in " + dir.string());
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::exception& e) {
    throw Error((dir / kMetadataFile).string() + ": " + e.what());
  }
  const auto seed = meta.at("seed").get<std::uint64_t>();
  LabelSpace labels(meta.at("label_space").get<std::vector<std::string>>());
  TrainHyperparams hp;
  hp.learning_rate = meta.at("hparams").at("learning_rate").get<double>();
  hp.total_steps = meta.at("hparams").at("total_steps").get<std::size_t>();
  hp.batch_size = meta.at("hparams").at("batch_size").get<std::size_t>();
  hp.grad_accumulation = meta.at("hparams").at("grad_accumulation").get<std::size_t>();

  auto encoder = make_encoder(meta.at("backbone").get<std::string>(), seed);
  Rng rng(0);
  nn::ClassifierHead head(encoder->frame_dim(), meta.at("head").at("hidden").get<std::vector<int>>(),
                          static_cast<int>(labels.size()), rng);

  std::map<std::string, nn::Parameter*> by_name;
  for (auto* p : encoder->parameters()) by_name[p->name] = p;
  for (auto* p : head.parameters()) by_name[p->name] = p;

  std::ifstream weights(dir / kWeightsFile, std::ios::binary);
  if (!weights) throw NotFoundError("no classifier weights in " + dir.string());
  std::vector<char> blob((std::istreambuf_iterator<char>(weights)), std::istreambuf_iterator<char>());
  for (const auto& entry : meta.at("parameters")) {
    auto name = entry.at("name").get<std::string>();
    auto it = by_name.find(name);
    if (it == by_name.end()) throw Error("classifier weights carry unknown parameter '" + name + "'");
    auto& value = it->second->value;
    auto rows = entry.at("rows").get<Eigen::Index>();
    auto cols = entry.at("cols").get<Eigen::Index>();
    if (rows != value.rows() || cols != value.cols())
      throw Error("shape mismatch for parameter '" + name + "'");
    auto offset = entry.at("offset").get<std::size_t>() * sizeof(double);
    auto bytes = static_cast<std::size_t>(value.size()) * sizeof(double);
    if (offset + bytes > blob.size()) throw Error("classifier weights file is truncated");
    std::memcpy(value.data(), blob.data() + offset, bytes);
    by_name.erase(it);
  }
  if (!by_name.empty()) throw Error("classifier weights miss parameter '" + by_name.begin()->first + "'");
  return Classifier(std::move(encoder), std::move(head), std::move(labels), hp, seed);
}

double CostReport::mean_train_seconds() const {
  double s = 0.0;
  for (double x : train_seconds) s += x;
  return train_seconds.empty() ? 0.0 : s / static_cast<double>(train_seconds.size());
}

double CostReport::mean_infer_seconds() const {
  double s = 0.0;
  for (double x : infer_seconds) s += x;
  return infer_seconds.empty() ? 0.0 : s / static_cast<double>(infer_seconds.size());
}

CostReport measure_cost(const SpeechEncoder& encoder, const TrainHyperparams& hparams,
                        std::span<const TrainExample> train, const Waveform& probe, std::size_t n_runs) {
  using Clock = std::chrono::steady_clock;
  CostReport report;
  report.encoder_id = encoder.id();
  report.hardware = describe_hardware();
  report.total_steps = hparams.total_steps;

  std::vector<std::string> questions;
  for (const auto& ex : train)
    if (std::find(questions.begin(), questions.end(), ex.question_id) == questions.end())
      questions.push_back(ex.question_id);
  LabelSpace labels(questions);

  for (std::size_t run = 0; run < n_runs; ++run) {
    auto t0 = Clock::now();
    auto result = fine_tune(encoder, train, labels, hparams, run);
    auto t1 = Clock::now();
    result.classifier.predict(probe);
    auto t2 = Clock::now();
    report.train_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    report.infer_seconds.push_back(std::chrono::duration<double>(t2 - t1).count());
  }
  return report;
}

std::string describe_hardware() {
  std::string model = "unknown CPU";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(colon + 2);
      break;
    }
  }
  std::ostringstream os;
  os << model << ", " << std::thread::hardware_concurrency() << " threads";
  return os.str();
}

}  // namespace egra
