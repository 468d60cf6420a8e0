// include/egra/audio.h

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

#ifndef EGRA_AUDIO_H_
#define EGRA_AUDIO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace egra {

inline constexpr int kCanonicalRateHz = 16000;
inline constexpr double kMaxDurationS = 10.0;

/// Audio as decoded from a container, before canonicalization.
/// Samples are interleaved when channels > 1.
struct DecodedAudio {
  std::vector<float> samples;
  int sample_rate_hz = 0;
  int channels = 0;

  std::size_t frames() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
};

/// Canonical internal audio: mono, 16 kHz, peak-normalized, on the PCM16
/// grid (every sample is k / 32767 for an integer k).
struct Waveform {
  std::vector<float> samples;
  int sample_rate_hz = kCanonicalRateHz;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  bool operator==(const Waveform&) const = default;
};

enum class WavEncoding { kPcm16, kFloat32 };

DecodedAudio decode_wav(std::span<const std::uint8_t> bytes);
DecodedAudio read_wav(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_wav(std::span<const float> samples,
                                     int sample_rate_hz, int channels,
                                     WavEncoding encoding);
void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate_hz, int channels,
               WavEncoding encoding = WavEncoding::kPcm16);
inline void write_wav(const std::filesystem::path& path, const Waveform& w) {
  write_wav(path, w.samples, w.sample_rate_hz, 1, WavEncoding::kPcm16);
}

/// Average of all channels.
std::vector<float> downmix(const DecodedAudio& audio);

/// Band-limited (Hann-windowed sinc) sample-rate conversion. Output length is
/// round(n * to / from).
std::vector<float> resample(std::span<const float> input, int from_hz, int to_hz);

/// Converts decoded audio to the canonical Waveform: downmix, resample to
/// 16 kHz, keep at most the first 10 s, peak-normalize and quantize to the
/// PCM16 grid. Throws on empty or zero-energy input.
Waveform canonicalize(const DecodedAudio& audio);

/// Magnitude spectrogram, frames x bins. Bin k sits at k * rate / n_fft Hz.
struct Spectrogram {
  std::vector<float> magnitudes;  // row-major, frames x bins
  std::size_t frames = 0;
  std::size_t bins = 0;
  double frame_step_s = 0.0;
  double bin_step_hz = 0.0;

  float at(std::size_t frame, std::size_t bin) const {
    return magnitudes[frame * bins + bin];
  }
  double frame_time_s(std::size_t frame) const { return frame * frame_step_s; }
  double bin_frequency_hz(std::size_t bin) const { return bin * bin_step_hz; }
};

/// Hann-windowed short-time magnitude spectrum with window length equal to
/// the FFT size. Frame count is floor((len - window) / hop) + 1.
Spectrogram compute_spectrogram(const Waveform& waveform, double window_ms,
                                double hop_ms);

std::size_t ms_to_samples(double ms, int sample_rate_hz);

}  // namespace egra

#endif  // EGRA_AUDIO_H_
