// src/rng.cc

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

#include "egra/rng.h"

#include <cmath>
#include <limits>

namespace egra {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

namespace {
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

SeedHasher::SeedHasher(std::uint64_t base) : state_(kFnvOffset) {
  add(static_cast<std::int64_t>(base));
}

void SeedHasher::mix_byte(unsigned char b) {
  state_ ^= b;
  state_ *= kFnvPrime;
}

SeedHasher& SeedHasher::add(std::string_view part) {
  for (char c : part) mix_byte(static_cast<unsigned char>(c));
  mix_byte(0xff);  // separator so ("ab","c") != ("a","bc")
  return *this;
}

SeedHasher& SeedHasher::add(std::int64_t part) {
  auto u = static_cast<std::uint64_t>(part);
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(u >> (8 * i)));
  mix_byte(0xfe);
  return *this;
}

std::uint64_t SeedHasher::finish() const { return splitmix64(state_); }

}  // namespace egra
