// src/common.cc

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

#include "egra/common.h"

namespace egra {

std::string_view to_string(Verdict v) {
  return v == Verdict::kCorrect ? "correct" : "incorrect";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "correct") return Verdict::kCorrect;
  if (text == "incorrect") return Verdict::kIncorrect;
  return std::nullopt;
}

Verdict verdict_from_string(std::string_view text) {
  auto v = parse_verdict(text);
  if (!v)
    throw InvalidArgumentError("malformed verdict '" + std::string(text) +
                               "' (expected 'correct' or 'incorrect')");
  return *v;
}

std::string_view to_string(ScenarioClass s) {
  switch (s) {
    case ScenarioClass::kAllCorrect: return "AllCorrect";
    case ScenarioClass::kMostlyCorrect: return "MostlyCorrect";
    case ScenarioClass::kMostlyIncorrect: return "MostlyIncorrect";
    case ScenarioClass::kAllIncorrect: return "AllIncorrect";
  }
  return "?";
}

}  // namespace egra
