// include/egra/common.h

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

#ifndef EGRA_COMMON_H_
#define EGRA_COMMON_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace egra {

/// Base error for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A referenced entity (recording, question, run) does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied a value outside the accepted domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

enum class Verdict { kCorrect, kIncorrect };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);
Verdict verdict_from_string(std::string_view text);  // throws InvalidArgumentError

/// Agreement pattern of three marker verdicts, indexed by the number of
/// `incorrect` verdicts.
enum class ScenarioClass { kAllCorrect = 0, kMostlyCorrect, kMostlyIncorrect, kAllIncorrect };

inline constexpr std::size_t kScenarioCount = 4;

std::string_view to_string(ScenarioClass s);

}  // namespace egra

#endif  // EGRA_COMMON_H_
