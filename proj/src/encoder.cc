// src/encoder.cc

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

#include "egra/encoder.h"

#include <cmath>
#include <map>
#include <mutex>

#include "egra/common.h"

namespace egra {

namespace {
constexpr double kWindowMs = 25.0;
constexpr double kHopMs = 10.0;
constexpr double kFeatureScale = 0.25;
}  // namespace

TinyEncoder::TinyEncoder(std::uint64_t seed, int frame_dim) {
  Rng rng(SeedHasher(seed).add("tiny-encoder").finish());
  projection_ = nn::Dense("encoder.projection", kBands, frame_dim, rng);
}

std::size_t TinyEncoder::min_samples() const {
  return ms_to_samples(kWindowMs, kCanonicalRateHz);
}

nn::Matrix TinyEncoder::featurize(const Waveform& waveform) const {
  if (waveform.samples.size() < min_samples())
    throw Error("waveform of " + std::to_string(waveform.samples.size()) +
                " samples is shorter than the encoder's minimum receptive field (" +
                std::to_string(min_samples()) + " samples)");
  Spectrogram spec = compute_spectrogram(waveform, kWindowMs, kHopMs);
  nn::Matrix features(static_cast<Eigen::Index>(spec.frames), kBands);
  // drop DC, split the rest into equal-width bands
  const std::size_t usable = spec.bins - 1;
  for (std::size_t f = 0; f < spec.frames; ++f) {
    for (int b = 0; b < kBands; ++b) {
      std::size_t lo = 1 + usable * static_cast<std::size_t>(b) / kBands;
      std::size_t hi = 1 + usable * static_cast<std::size_t>(b + 1) / kBands;
      double power = 0.0;
      for (std::size_t k = lo; k < hi; ++k) power += static_cast<double>(spec.at(f, k)) * spec.at(f, k);
      features(static_cast<Eigen::Index>(f), b) = std::log(power / static_cast<double>(hi - lo) + 1e-8);
    }
  }
  // per-frame mean removal discards overall level, keeps spectral shape
  Eigen::VectorXd frame_mean = features.rowwise().mean();
  features.colwise() -= frame_mean;
  return features * kFeatureScale;
}

nn::Matrix TinyEncoder::forward(const nn::Matrix& features, EncoderTape* tape) const {
  nn::Matrix out = projection_.forward(features).array().tanh().matrix();
  if (tape) tape->activations = {features, out};
  return out;
}

void TinyEncoder::backward(const EncoderTape& tape, const nn::Matrix& grad_frames) {
  const nn::Matrix& out = tape.activations.at(1);
  nn::Matrix grad_pre = grad_frames.array() * (1.0 - out.array().square());
  projection_.backward(tape.activations.at(0), grad_pre);
}

std::vector<nn::Parameter*> TinyEncoder::parameters() {
  return {&projection_.weight, &projection_.bias};
}

std::unique_ptr<SpeechEncoder> TinyEncoder::clone() const {
  return std::make_unique<TinyEncoder>(*this);
}

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, EncoderFactory> factories;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_encoder(const std::string& prefix, EncoderFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[prefix] = std::move(factory);
}

std::unique_ptr<SpeechEncoder> make_encoder(const std::string& checkpoint_id, std::uint64_t seed) {
  if (checkpoint_id == "tiny") return std::make_unique<TinyEncoder>(seed);
  auto& r = registry();
  std::lock_guard lock(r.mu);
  // longest matching prefix wins
  const EncoderFactory* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& [prefix, factory] : r.factories) {
    if (checkpoint_id.rfind(prefix, 0) == 0 && prefix.size() >= best_len) {
      best = &factory;
      best_len = prefix.size();
    }
  }
  if (!best)
    throw NotFoundError("no encoder backend registered for checkpoint '" + checkpoint_id +
                        "' (built-in: 'tiny')");
  return (*best)(checkpoint_id, seed);
}

}  // namespace egra
