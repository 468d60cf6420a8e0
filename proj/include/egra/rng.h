// include/egra/rng.h

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

#ifndef EGRA_RNG_H_
#define EGRA_RNG_H_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace egra {

/// Seeded generator whose output depends only on the seed, not on the
/// standard library's distribution implementations. Everything that must
/// replay bit-for-bit (splits, plans, head init) draws from this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// First k elements of a seeded permutation of `items`.
  template <typename T>
  std::vector<T> sample(std::vector<T> items, std::size_t k) {
    // partial Fisher-Yates from the front
    for (std::size_t i = 0; i < k && i < items.size(); ++i) {
      std::size_t j = i + static_cast<std::size_t>(uniform_index(items.size() - i));
      std::swap(items[i], items[j]);
    }
    items.resize(std::min(k, items.size()));
    return items;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable 64-bit hash of a sequence of key parts (FNV-1a followed by a
/// splitmix64 finalizer). Used to derive independent per-run seeds.
class SeedHasher {
 public:
  explicit SeedHasher(std::uint64_t base);
  SeedHasher& add(std::string_view part);
  SeedHasher& add(std::int64_t part);
  std::uint64_t finish() const;

 private:
  void mix_byte(unsigned char b);
  std::uint64_t state_;
};

}  // namespace egra

#endif  // EGRA_RNG_H_
