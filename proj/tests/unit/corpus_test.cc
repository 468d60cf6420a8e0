// tests/unit/corpus_test.cc

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

#include <doctest.h>

#include <sstream>

#include "egra/corpus.h"
#include "egra/synth.h"
#include "test_support.h"

using namespace egra;
using egra::testing::recording;
using egra::testing::TempDir;

namespace {

const char* kThreeLines =
    R"({"id":"r1","question":"ewe","audio":"r1.wav","duration_s":1.5,"sample_rate_hz":16000,"labels":[{"marker":"a","verdict":"correct"},{"marker":"b","verdict":"correct"},{"marker":"c","verdict":"incorrect"}]})"
    "\n"
    R"({"id":"r2","question":"d","audio":"r2.wav","duration_s":2.0,"sample_rate_hz":44100,"labels":[{"marker":"a","verdict":"incorrect"}],"grade":2})"
    "\n"
    "\n"
    R"({"id":"r3","question":"ng","audio":"sub/r3.wav","duration_s":0.8,"sample_rate_hz":8000,"labels":[],"collected_at":"2023-05-01"})"
    "\n";

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_manifest(in, "m.jsonl");
}

}  // namespace

TEST_CASE("standard questions") {
  const auto& qs = standard_questions();
  REQUIRE(qs.size() == 10);
  std::vector<std::string> ids;
  for (const auto& q : qs) ids.push_back(q.id);
  CHECK(ids == std::vector<std::string>{"d", "v", "n", "ewe", "hayi", "hl", "inja", "kude", "molo", "ng"});
  CHECK(qs[0].kind == QuestionKind::kLetter);
  CHECK(qs[5].kind == QuestionKind::kConsonantCluster);
  CHECK(qs[3].kind == QuestionKind::kWord);
}

TEST_CASE("parse_manifest: 3-line fixture") {
  Corpus c = parse(kThreeLines);
  CHECK(c.size() == 3);
  CHECK(c.label_count() == 4);
  CHECK(c.recording("r1").labels.size() == 3);
  CHECK(c.recording("r2").grade == 2);
  CHECK(c.recording("r3").collected_at == "2023-05-01");
  CHECK(c.find("zz") == nullptr);
  CHECK_THROWS_AS(c.recording("zz"), NotFoundError);
  CHECK(c.question("hl").text == "hl");
}

TEST_CASE("parse_manifest: errors carry location and offending id") {
  std::string dup = std::string(kThreeLines) +
                    R"({"id":"r2","question":"d","audio":"x.wav","duration_s":1,"sample_rate_hz":16000,"labels":[]})" "\n";
  CHECK_THROWS_WITH_AS(parse(dup), doctest::Contains("m.jsonl:5: duplicate recording id 'r2'"), Error);
  CHECK_THROWS_WITH_AS(parse("{not json\n"), doctest::Contains("m.jsonl:1: malformed"), Error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"id":"x","question":"zebra","audio":"x.wav","duration_s":1,"sample_rate_hz":16000,"labels":[]})"),
      doctest::Contains("unknown question id 'zebra'"), Error);
  CHECK_THROWS_WITH_AS(
      parse(R"({"id":"x","question":"d","audio":"x.wav","duration_s":1,"sample_rate_hz":16000,"labels":[{"marker":"a","verdict":"maybe"}]})"),
      doctest::Contains("m.jsonl:1"), Error);
  CHECK_THROWS_AS(
      parse(R"({"id":"x","question":"d","audio":"x.wav","duration_s":0,"sample_rate_hz":16000,"labels":[]})"), Error);
  CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.jsonl"), NotFoundError);
}

TEST_CASE("Corpus validation") {
  auto r = recording("a", "d", "cc");
  r.labels.push_back({"m1", Verdict::kCorrect});
  CHECK_THROWS_WITH_AS(Corpus(standard_questions(), {r}), doctest::Contains("two labels from marker 'm1'"), Error);
  auto four = recording("b", "d", "cccc");
  CHECK_THROWS_AS(Corpus(standard_questions(), {four}), Error);
  CHECK_THROWS_AS(Corpus(standard_questions(), {recording("c", "d", "c"), recording("c", "v", "c")}), Error);
}

TEST_CASE("manifest write/read round trip") {
  TempDir dir;
  Corpus c = parse(kThreeLines);
  write_manifest(dir / "manifest.jsonl", c);
  Corpus back = load_manifest(dir / "manifest.jsonl");
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(manifest_line(back.recordings()[i]) == manifest_line(c.recordings()[i]));
  auto loc = open_corpus(dir.path());
  CHECK(loc.corpus.size() == 3);
  CHECK(loc.audio_root == dir.path());
  auto loc2 = open_corpus(dir / "manifest.jsonl");
  CHECK(loc2.audio_root == dir.path());
}

TEST_CASE("ingest_audio reads relative to the audio root") {
  TempDir dir;
  std::filesystem::create_directories(dir / "sub");
  write_wav(dir / "sub/r.wav", testing::sine(200, 1.0, 8000), 8000, 1);
  auto r = recording("r", "d", "ccc");
  r.audio_path = "sub/r.wav";
  Waveform w = ingest_audio(r, dir.path());
  CHECK(w.samples.size() == 16000);
  r.audio_path = "missing.wav";
  CHECK_THROWS_WITH_AS(ingest_audio(r, dir.path()), doctest::Contains("missing.wav"), NotFoundError);
}

TEST_CASE("summarize_distribution") {
  SUBCASE("single unanimous recording") {
    Corpus c(standard_questions(), {recording("a", "n", "ccc")});
    auto s = summarize_distribution(c);
    CHECK(s.counts.at("n") == std::array<std::size_t, 4>{1, 0, 0, 0});
  }
  SUBCASE("six recordings, hand enumerated") {
    Corpus c(standard_questions(),
             {recording("1", "d", "ccc"), recording("2", "d", "cic"), recording("3", "d", "iic"),
              recording("4", "v", "iii"), recording("5", "v", "icc"), recording("6", "v", "cc")});
    auto s = summarize_distribution(c);
    CHECK(s.counts.at("d") == std::array<std::size_t, 4>{1, 1, 1, 0});
    CHECK(s.counts.at("v") == std::array<std::size_t, 4>{0, 1, 0, 1});
    CHECK(s.excluded == std::vector<std::string>{"6"});
  }
  SUBCASE("release-shaped synthetic corpus: n is mostly unanimous correct") {
    Corpus c = synth::make_corpus(synth::released_counts(), 1.0);
    CHECK(c.size() == 14971);
    CHECK(c.label_count() == 44913);
    auto s = summarize_distribution(c);
    const auto& n = s.counts.at("n");
    CHECK(n[0] > n[1] + n[2] + n[3]);
  }
}
