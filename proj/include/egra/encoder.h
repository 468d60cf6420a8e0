// include/egra/encoder.h

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

#ifndef EGRA_ENCODER_H_
#define EGRA_ENCODER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "egra/audio.h"
#include "egra/nn.h"

namespace egra {

/// Activations a trainable encoder keeps between forward and backward.
struct EncoderTape {
  std::vector<nn::Matrix> activations;
};

/// A speech backbone mapping a canonical waveform to a time sequence of
/// frame embeddings. The computation is split into a frozen front end
/// (`featurize`, computed once per recording) and a trainable body
/// (`forward` / `backward`) that is updated during fine-tuning.
class SpeechEncoder {
 public:
  virtual ~SpeechEncoder() = default;

  virtual std::string id() const = 0;
  virtual int frame_dim() const = 0;
  /// Shortest waveform (in samples) that yields at least one frame.
  virtual std::size_t min_samples() const = 0;

  virtual nn::Matrix featurize(const Waveform& waveform) const = 0;
  /// features (frames x F) -> embeddings (frames x frame_dim). `tape` may be
  /// null; the result is deterministic either way.
  virtual nn::Matrix forward(const nn::Matrix& features, EncoderTape* tape) const = 0;
  /// Accumulates parameter gradients given dL/d(embeddings).
  virtual void backward(const EncoderTape& tape, const nn::Matrix& grad_frames) = 0;

  virtual std::vector<nn::Parameter*> parameters() = 0;
  virtual std::unique_ptr<SpeechEncoder> clone() const = 0;

  nn::Matrix encode(const Waveform& waveform) const { return forward(featurize(waveform), nullptr); }
};

/// Desk-scale backbone: log band energies from a 25 ms / 10 ms spectrogram
/// followed by one trainable tanh projection.
class TinyEncoder final : public SpeechEncoder {
 public:
  static constexpr int kBands = 40;
  static constexpr int kDefaultFrameDim = 32;

  explicit TinyEncoder(std::uint64_t seed, int frame_dim = kDefaultFrameDim);

  std::string id() const override { return "tiny"; }
  int frame_dim() const override { return projection_.out_dim(); }
  std::size_t min_samples() const override;

  nn::Matrix featurize(const Waveform& waveform) const override;
  nn::Matrix forward(const nn::Matrix& features, EncoderTape* tape) const override;
  void backward(const EncoderTape& tape, const nn::Matrix& grad_frames) override;

  std::vector<nn::Parameter*> parameters() override;
  std::unique_ptr<SpeechEncoder> clone() const override;

 private:
  nn::Dense projection_;
};

using EncoderFactory = std::function<std::unique_ptr<SpeechEncoder>(const std::string& checkpoint_id,
                                                                    std::uint64_t seed)>;

/// Makes checkpoint ids starting with `prefix` resolvable by make_encoder.
void register_encoder(const std::string& prefix, EncoderFactory factory);

/// Resolves a checkpoint identifier to a backbone. "tiny" is always
/// available; other ids need a registered factory.
std::unique_ptr<SpeechEncoder> make_encoder(const std::string& checkpoint_id, std::uint64_t seed);

}  // namespace egra

#endif  // EGRA_ENCODER_H_
