// src/experiments.cc

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

#include "egra/experiments.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "egra/rng.h"

namespace egra {

using nlohmann::json;

LabeledPool::LabeledPool(const RetainedSet& retained) {
  for (const auto& item : retained.items) {
    auto& [pos, neg] = by_question_[item.question_id];
    (item.label == Verdict::kCorrect ? pos : neg).push_back(item.recording_id);
  }
}

const std::vector<std::string>& LabeledPool::positives(const std::string& question) const {
  auto it = by_question_.find(question);
  return it == by_question_.end() ? empty_ : it->second.first;
}

const std::vector<std::string>& LabeledPool::negatives(const std::string& question) const {
  auto it = by_question_.find(question);
  return it == by_question_.end() ? empty_ : it->second.second;
}

std::vector<std::string> LabeledPool::questions() const {
  std::vector<std::string> out;
  for (const auto& [q, _] : by_question_) out.push_back(q);
  return out;
}

TestSplit make_test_split(const LabeledPool& pool, const std::string& question,
                          std::uint64_t seed, std::size_t per_class) {
  const auto& pos = pool.positives(question);
  const auto& neg = pool.negatives(question);
  if (pos.size() < per_class)
    throw Error("question '" + question + "' has " + std::to_string(pos.size()) +
                " consensus-correct recordings, test split needs " + std::to_string(per_class));
  if (neg.size() < per_class)
    throw Error("question '" + question + "' has " + std::to_string(neg.size()) +
                " consensus-incorrect recordings, test split needs " + std::to_string(per_class));
  TestSplit split;
  split.question_id = question;
  split.seed = seed;
  Rng rng(seed);
  split.positive_ids = rng.sample(pos, per_class);
  split.negative_ids = rng.sample(neg, per_class);
  return split;
}

std::vector<TrainingItem> make_train_sample(const LabeledPool& pool, const TrainConfig& config,
                                            const std::set<std::string>& excluded) {
  if (config.question_set.empty()) throw InvalidArgumentError("question set is empty");
  std::set<std::string> unique(config.question_set.begin(), config.question_set.end());
  if (unique.size() != config.question_set.size())
    throw InvalidArgumentError("question set contains duplicates");

  auto available = [&](const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (const auto& id : ids)
      if (!excluded.count(id)) out.push_back(id);
    return out;
  };

  std::vector<TrainingItem> items;
  items.reserve(config.question_set.size() * (config.n_correct + config.n_incorrect));
  for (std::size_t qi = 0; qi < config.question_set.size(); ++qi) {
    const auto& q = config.question_set[qi];
    auto pos = available(pool.positives(q));
    auto neg = available(pool.negatives(q));
    if (pos.size() < config.n_correct)
      throw Error("question '" + q + "' has " + std::to_string(pos.size()) +
                  " positives left after test exclusion, needs " + std::to_string(config.n_correct));
    if (neg.size() < config.n_incorrect)
      throw Error("question '" + q + "' has " + std::to_string(neg.size()) +
                  " negatives left after test exclusion, needs " + std::to_string(config.n_incorrect));
    Rng rng(SeedHasher(config.seed).add(q).finish());
    for (auto& id : rng.sample(std::move(pos), config.n_correct))
      items.push_back({std::move(id), q, Verdict::kCorrect});
    for (auto& id : rng.sample(std::move(neg), config.n_incorrect))
      items.push_back({std::move(id), q, Verdict::kIncorrect});
  }
  return items;
}

std::vector<std::vector<std::string>> make_question_sets(std::vector<std::string> questions,
                                                         std::size_t set_size, std::uint64_t seed) {
  if (set_size == 0 || set_size > questions.size())
    throw InvalidArgumentError("set size must lie in [1, " + std::to_string(questions.size()) + "]");
  Rng rng(SeedHasher(seed).add("question-sets").add(static_cast<std::int64_t>(set_size)).finish());
  rng.shuffle(questions);
  std::vector<std::vector<std::string>> groups;
  for (std::size_t i = 0; i < questions.size(); i += set_size) {
    auto end = std::min(questions.size(), i + set_size);
    groups.emplace_back(questions.begin() + static_cast<std::ptrdiff_t>(i),
                        questions.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return groups;
}

std::vector<GridCell> full_grid() {
  static constexpr std::size_t kSizes[] = {50, 100, 200, 300};
  std::vector<GridCell> grid;
  for (auto c : kSizes)
    for (auto i : kSizes) grid.emplace_back(c, i);
  return grid;
}

std::vector<GridCell> parse_grid(const std::string& spec) {
  if (spec == "full") return full_grid();
  std::vector<GridCell> grid;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto x = cell.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument(cell);
      grid.emplace_back(std::stoul(cell.substr(0, x)), std::stoul(cell.substr(x + 1)));
    } catch (const std::exception&) {
      throw InvalidArgumentError("malformed grid cell '" + cell + "' (expected CxI, e.g. 300x200)");
    }
  }
  if (grid.empty()) throw InvalidArgumentError("empty training grid");
  return grid;
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string PlannedRun::key() const {
  std::string model = model_id;
  for (char& c : model)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '-';
  std::ostringstream os;
  os << model << "_s" << set_size << "_q" << join(question_set, '+') << "_c" << n_correct << "_i"
     << n_incorrect << "_r" << replicate;
  return os.str();
}

std::size_t expected_run_count(std::size_t n_questions, const PlanOptions& options) {
  std::size_t groups = 0;
  for (auto s : options.set_sizes) groups += (n_questions + s - 1) / s;
  return options.models.size() * groups * options.grid.size() * options.n_replicates;
}

ExperimentPlan plan_experiments(const LabeledPool& pool, const std::vector<std::string>& questions,
                                const PlanOptions& options) {
  if (options.models.empty()) throw InvalidArgumentError("no models given");
  if (options.set_sizes.empty()) throw InvalidArgumentError("no set sizes given");
  if (options.grid.empty()) throw InvalidArgumentError("empty training grid");
  if (options.n_replicates == 0) throw InvalidArgumentError("n_replicates must be positive");

  // replicate -> question -> split
  std::vector<std::map<std::string, TestSplit>> splits(options.n_replicates);
  for (std::size_t r = 0; r < options.n_replicates; ++r) {
    for (const auto& q : questions) {
      auto seed = SeedHasher(options.base_seed).add("test").add(static_cast<std::int64_t>(r)).add(q).finish();
      try {
        splits[r].emplace(q, make_test_split(pool, q, seed, options.test_per_class));
      } catch (const Error& e) {
        throw Error("replicate " + std::to_string(r) + ": " + e.what());
      }
    }
  }

  ExperimentPlan plan;
  plan.runs.reserve(expected_run_count(questions.size(), options));
  for (const auto& model : options.models) {
    for (auto set_size : options.set_sizes) {
      auto groups = make_question_sets(questions, set_size, options.base_seed);
      for (const auto& group : groups) {
        for (const auto& [n_correct, n_incorrect] : options.grid) {
          for (std::size_t r = 0; r < options.n_replicates; ++r) {
            PlannedRun run;
            run.model_id = model;
            run.set_size = set_size;
            run.n_correct = n_correct;
            run.n_incorrect = n_incorrect;
            run.question_set = group;
            run.replicate = r;
            run.seed = SeedHasher(options.base_seed)
                           .add(model)
                           .add(static_cast<std::int64_t>(set_size))
                           .add(join(group, '+'))
                           .add(static_cast<std::int64_t>(n_correct))
                           .add(static_cast<std::int64_t>(n_incorrect))
                           .add(static_cast<std::int64_t>(r))
                           .finish();
            std::set<std::string> excluded;
            for (const auto& q : group) {
              const auto& split = splits[r].at(q);
              excluded.insert(split.positive_ids.begin(), split.positive_ids.end());
              excluded.insert(split.negative_ids.begin(), split.negative_ids.end());
              run.test.push_back(split);
            }
            TrainConfig config{n_correct, n_incorrect, group, run.seed};
            try {
              run.train = make_train_sample(pool, config, excluded);
            } catch (const Error& e) {
              throw Error("run " + run.key() + ": " + e.what());
            }
            plan.runs.push_back(std::move(run));
          }
        }
      }
    }
  }
  return plan;
}

json to_json(const ExperimentPlan& plan) {
  json runs = json::array();
  for (const auto& run : plan.runs) {
    json train = json::array();
    for (const auto& t : run.train)
      train.push_back({{"id", t.recording_id}, {"question", t.question_id}, {"label", to_string(t.label)}});
    json test = json::array();
    for (const auto& s : run.test)
      test.push_back({{"question", s.question_id},
                      {"seed", s.seed},
                      {"positive", s.positive_ids},
                      {"negative", s.negative_ids}});
    runs.push_back({{"model_id", run.model_id},
                    {"set_size", run.set_size},
                    {"question_set", run.question_set},
                    {"n_correct", run.n_correct},
                    {"n_incorrect", run.n_incorrect},
                    {"replicate", run.replicate},
                    {"seed", run.seed},
                    {"train", std::move(train)},
                    {"test", std::move(test)}});
  }
  return runs;
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  try {
    for (const auto& r : j) {
      PlannedRun run;
      run.model_id = r.at("model_id").get<std::string>();
      run.set_size = r.at("set_size").get<std::size_t>();
      run.question_set = r.at("question_set").get<std::vector<std::string>>();
      run.n_correct = r.at("n_correct").get<std::size_t>();
      run.n_incorrect = r.at("n_incorrect").get<std::size_t>();
      run.replicate = r.at("replicate").get<std::size_t>();
      run.seed = r.at("seed").get<std::uint64_t>();
      for (const auto& t : r.at("train"))
        run.train.push_back({t.at("id").get<std::string>(), t.at("question").get<std::string>(),
                             verdict_from_string(t.at("label").get<std::string>())});
      for (const auto& s : r.at("test")) {
        TestSplit split;
        split.question_id = s.at("question").get<std::string>();
        split.seed = s.at("seed").get<std::uint64_t>();
        split.positive_ids = s.at("positive").get<std::vector<std::string>>();
        split.negative_ids = s.at("negative").get<std::vector<std::string>>();
        run.test.push_back(std::move(split));
      }
      plan.runs.push_back(std::move(run));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed plan: ") + e.what());
  }
  return plan;
}

void write_plan(const std::filesystem::path& path, const ExperimentPlan& plan) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(plan).dump() << '\n';
}

ExperimentPlan read_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("plan file not found: " + path.string());
  try {
    return plan_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace egra
