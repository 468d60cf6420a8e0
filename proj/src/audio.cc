// src/audio.cc

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

#include "egra/audio.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <iterator>

#include <unsupported/Eigen/FFT>

#include "egra/common.h"

namespace egra {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr float kPcm16Scale = 32767.0f;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

float quantize_pcm16(float x) {
  float q = std::round(std::clamp(x, -1.0f, 1.0f) * kPcm16Scale);
  return q / kPcm16Scale;
}

}  // namespace

DecodedAudio decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error("truncated fmt chunk");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible && avail >= 26)
        format = read_u16(chunk + 8 + 24);  // first two bytes of the subformat GUID
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (format == 0) throw Error("WAV file has no fmt chunk");
  if (data == nullptr) throw Error("WAV file has no data chunk");
  if (channels == 0 || rate == 0) throw Error("WAV header declares zero channels or rate");

  DecodedAudio out;
  out.channels = channels;
  out.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    std::size_t n = data_size / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = static_cast<std::int16_t>(read_u16(data + 2 * i));
      out.samples[i] = std::max(-1.0f, static_cast<float>(s) / kPcm16Scale);
    }
  } else if (format == kFormatFloat && bits == 32) {
    std::size_t n = data_size / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = read_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &u, sizeof f);
      out.samples[i] = f;
    }
  } else {
    throw Error("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                std::to_string(bits) + " bits); expected PCM16 or float32");
  }
  out.samples.resize(out.frames() * channels);
  return out;
}

DecodedAudio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open audio file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples,
                                     int sample_rate_hz, int channels,
                                     WavEncoding encoding) {
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(samples.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz) * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (float x : samples) {
    if (encoding == WavEncoding::kPcm16) {
      auto s = static_cast<std::int16_t>(std::lround(std::clamp(x, -1.0f, 1.0f) * kPcm16Scale));
      put_u16(out, static_cast<std::uint16_t>(s));
    } else {
      std::uint32_t u;
      std::memcpy(&u, &x, sizeof u);
      put_u32(out, u);
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate_hz, int channels, WavEncoding encoding) {
  auto bytes = encode_wav(samples, sample_rate_hz, channels, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<float> downmix(const DecodedAudio& audio) {
  const std::size_t frames = audio.frames();
  if (audio.channels == 1) return audio.samples;
  std::vector<float> mono(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < audio.channels; ++c)
      acc += audio.samples[f * audio.channels + c];
    mono[f] = static_cast<float>(acc / audio.channels);
  }
  return mono;
}

std::vector<float> resample(std::span<const float> input, int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0) throw InvalidArgumentError("sample rates must be positive");
  if (from_hz == to_hz) return {input.begin(), input.end()};

  constexpr int kZeroCrossings = 16;
  const double ratio = static_cast<double>(to_hz) / from_hz;
  const double cutoff = std::min(1.0, ratio);
  const double half_width = kZeroCrossings / cutoff;
  const auto n_in = static_cast<std::int64_t>(input.size());
  const auto n_out = static_cast<std::int64_t>(
      std::llround(static_cast<double>(input.size()) * to_hz / from_hz));

  std::vector<float> out(static_cast<std::size_t>(n_out));
  for (std::int64_t m = 0; m < n_out; ++m) {
    // exact rational source position m * from / to
    const double t = static_cast<double>(m * from_hz) / to_hz;
    const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(t - half_width)));
    const auto hi = std::min<std::int64_t>(n_in - 1, static_cast<std::int64_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double x = t - static_cast<double>(k);
      const double arg = M_PI * cutoff * x;
      const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      const double window = 0.5 * (1.0 + std::cos(M_PI * x / half_width));
      acc += input[static_cast<std::size_t>(k)] * cutoff * sinc * window;
    }
    out[static_cast<std::size_t>(m)] = static_cast<float>(acc);
  }
  return out;
}

Waveform canonicalize(const DecodedAudio& audio) {
  if (audio.frames() == 0) throw Error("zero-length audio");
  std::vector<float> mono = downmix(audio);
  if (std::all_of(mono.begin(), mono.end(), [](float x) { return x == 0.0f; }))
    throw Error("zero-energy audio");

  std::vector<float> samples = resample(mono, audio.sample_rate_hz, kCanonicalRateHz);
  const auto cap = static_cast<std::size_t>(kMaxDurationS * kCanonicalRateHz);
  if (samples.size() > cap) samples.resize(cap);
  if (samples.empty()) throw Error("zero-length audio");

  float peak = 0.0f;
  for (float x : samples) peak = std::max(peak, std::abs(x));
  if (peak == 0.0f) throw Error("zero-energy audio");

  const float scale = peak == 1.0f ? 1.0f : 1.0f / peak;
  Waveform w;
  w.samples.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    w.samples[i] = quantize_pcm16(samples[i] * scale);
  return w;
}

std::size_t ms_to_samples(double ms, int sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(ms * sample_rate_hz / 1000.0));
}

Spectrogram compute_spectrogram(const Waveform& waveform, double window_ms,
                                double hop_ms) {
  if (!(hop_ms > 0.0) || window_ms < hop_ms)
    throw InvalidArgumentError("spectrogram requires window_ms >= hop_ms > 0");
  const std::size_t window = ms_to_samples(window_ms, waveform.sample_rate_hz);
  const std::size_t hop = std::max<std::size_t>(1, ms_to_samples(hop_ms, waveform.sample_rate_hz));
  if (window < 2) throw InvalidArgumentError("spectrogram window shorter than two samples");
  if (waveform.samples.size() < window)
    throw Error("waveform shorter than one spectrogram window (" +
                std::to_string(waveform.samples.size()) + " < " +
                std::to_string(window) + " samples)");

  Spectrogram spec;
  spec.frames = (waveform.samples.size() - window) / hop + 1;
  spec.bins = window / 2 + 1;
  spec.frame_step_s = static_cast<double>(hop) / waveform.sample_rate_hz;
  spec.bin_step_hz = static_cast<double>(waveform.sample_rate_hz) / static_cast<double>(window);
  spec.magnitudes.resize(spec.frames * spec.bins);

  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(window));

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(window);
  std::vector<std::complex<double>> bins;
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const float* src = waveform.samples.data() + f * hop;
    for (std::size_t i = 0; i < window; ++i) frame[i] = src[i] * hann[i];
    fft.fwd(bins, frame);
    for (std::size_t b = 0; b < spec.bins; ++b)
      spec.magnitudes[f * spec.bins + b] = static_cast<float>(std::abs(bins[b]));
  }
  return spec;
}

}  // namespace egra
