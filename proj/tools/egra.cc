// tools/egra.cc

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

// egra: command-line front end for the reading-assessment toolkit.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "egra/asr_baseline.h"
#include "egra/consensus.h"
#include "egra/corpus.h"
#include "egra/encoder.h"
#include "egra/experiments.h"
#include "egra/harness.h"
#include "egra/metrics.h"
#include "egra/report.h"
#include "egra/review.h"
#include "egra/synth.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw egra::Error("cannot write " + path.string());
  out << content;
}

void print_agreement(const egra::review::AgreementReport& r, std::ostream& os) {
  os << "Condition                    Agreement   Judged  Recordings\n";
  for (const auto& row : r.rows) {
    auto rate = row.agreement.rate_or_null();
    std::string name(egra::policy_display_name(row.policy));
    os << name << std::string(29 - std::min<std::size_t>(28, name.size()), ' ')
       << (rate ? egra::report::format_percent(*rate) + "%" : std::string("-")) << "\t" << row.agreement.retained
       << "\t" << row.retained << " (" << egra::report::format_share(row.retained, row.total) << "%)\n";
  }
}

// ---- ingest ---------------------------------------------------------------

int run_ingest(const fs::path& manifest, const fs::path& audio_root, const fs::path& out_dir, int jobs) {
  egra::Corpus corpus = egra::load_manifest(manifest);
  fs::create_directories(out_dir / "audio");
  std::vector<std::optional<egra::Recording>> done(corpus.size());
  std::vector<std::string> failures;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next++) < corpus.size();) {
      egra::Recording r = corpus.recordings()[i];
      try {
        egra::Waveform w = egra::ingest_audio(r, audio_root);
        r.audio_path = "audio/" + r.id + ".wav";
        r.duration_s = w.duration_s();
        r.sample_rate_hz = w.sample_rate_hz;
        egra::write_wav(out_dir / r.audio_path, w);
        done[i] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        failures.push_back(r.id + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<egra::Recording> kept;
  for (auto& r : done)
    if (r) kept.push_back(std::move(*r));
  egra::write_manifest(out_dir / egra::kManifestFileName, egra::Corpus(corpus.questions(), kept));
  std::sort(failures.begin(), failures.end());
  for (const auto& f : failures) std::cerr << "egra: skipped " << f << "\n";
  std::cout << "ingested " << kept.size() << " of " << corpus.size() << " recordings ("
            << corpus.label_count() << " labels) into " << out_dir.string() << "\n";
  return kept.empty() && corpus.size() > 0 ? 1 : 0;
}

// ---- consensus / validation ----------------------------------------------------

int run_consensus(const fs::path& corpus_path, const std::string& policy_key, const fs::path& out) {
  auto loc = egra::open_corpus(corpus_path);
  auto policy = egra::parse_policy(policy_key);
  auto kept = egra::apply_policy(loc.corpus, policy);
  std::ofstream os(out, std::ios::trunc);
  if (!os) throw egra::Error("cannot write " + out.string());
  for (const auto& item : kept.items) {
    json j = json::parse(egra::manifest_line(loc.corpus.recording(item.recording_id)));
    j["label"] = egra::to_string(item.label);
    os << j.dump() << "\n";
  }
  auto summary = egra::summarize_distribution(loc.corpus);
  std::cout << egra::policy_display_name(policy) << ": retained " << kept.items.size() << " of " << kept.considered
            << " fully labeled recordings (" << egra::report::format_share(kept.items.size(), kept.considered)
            << "%)";
  if (!summary.excluded.empty()) std::cout << "; " << summary.excluded.size() << " partially labeled excluded";
  std::cout << "\n";
  return 0;
}

int run_validate_sample(const fs::path& corpus_path, std::uint64_t seed, std::size_t per_scenario,
                        const fs::path& out) {
  auto loc = egra::open_corpus(corpus_path);
  auto ids = egra::sample_validation_set(loc.corpus, per_scenario, seed);
  json items = json::array();
  for (const auto& id : ids) {
    const auto& r = loc.corpus.recording(id);
    items.push_back({{"recording_id", id}, {"question", r.question_id}, {"audio", r.audio_path}});
  }
  write_file(out, json{{"seed", seed}, {"per_scenario", per_scenario}, {"recordings", items}}.dump(2) + "\n");
  std::cout << "sampled " << ids.size() << " recordings into " << out.string() << "\n";
  return 0;
}

int run_validate_report(const fs::path& corpus_path, const fs::path& judgments_path, bool as_json) {
  auto loc = egra::open_corpus(corpus_path);
  auto judgments = egra::read_judgments(judgments_path);
  auto report = egra::review::agreement_report(loc.corpus, judgments);
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    print_agreement(report, std::cout);
  }
  return 0;
}

// ---- plan / train / infer / eval / rank ------------------------------------------

int run_plan(const fs::path& corpus_path, const std::string& models, const std::string& set_sizes,
             const std::string& grid, std::uint64_t seed, std::size_t replicates, const fs::path& out) {
  auto loc = egra::open_corpus(corpus_path);
  egra::LabeledPool pool(egra::apply_policy(loc.corpus, egra::ConsensusPolicy::kConsensus));
  egra::PlanOptions options;
  options.models = split_list(models);
  options.set_sizes.clear();
  for (const auto& s : split_list(set_sizes)) options.set_sizes.push_back(std::stoul(s));
  options.grid = egra::parse_grid(grid);
  options.n_replicates = replicates;
  options.base_seed = seed;
  std::vector<std::string> questions;
  for (const auto& q : loc.corpus.questions()) questions.push_back(q.id);
  auto plan = egra::plan_experiments(pool, questions, options);
  write_file(out, egra::to_json(plan).dump() + "\n");
  std::cout << "planned " << plan.runs.size() << " runs into " << out.string() << "\n";
  return 0;
}

struct TrainArgs {
  fs::path plan, corpus, out;
  std::string model;
  egra::TrainHyperparams hparams;
  std::size_t limit = 0;
  int jobs = 1;
};

int run_train(const TrainArgs& args) {
  auto loc = egra::open_corpus(args.corpus);
  auto plan = egra::read_plan(args.plan);
  std::vector<const egra::PlannedRun*> runs;
  for (const auto& r : plan.runs)
    if (r.model_id == args.model) runs.push_back(&r);
  if (args.limit && runs.size() > args.limit) runs.resize(args.limit);
  if (runs.empty()) throw egra::Error("plan has no runs for model '" + args.model + "'");
  auto backbone = egra::make_encoder(args.model, 0);

  std::mutex cache_mu;
  std::map<std::string, std::shared_ptr<const egra::Waveform>> cache;
  auto waveform = [&](const std::string& id) {
    {
      std::lock_guard lock(cache_mu);
      if (auto it = cache.find(id); it != cache.end()) return it->second;
    }
    auto w = std::make_shared<const egra::Waveform>(egra::ingest_audio(loc.corpus.recording(id), loc.audio_root));
    std::lock_guard lock(cache_mu);
    return cache.emplace(id, std::move(w)).first->second;
  };

  std::atomic<std::size_t> next{0}, finished{0};
  std::mutex io_mu;
  std::exception_ptr failure;
  auto worker = [&]() {
    for (std::size_t i; (i = next++) < runs.size();) {
      const auto& run = *runs[i];
      try {
        std::vector<egra::TrainExample> train;
        train.reserve(run.train.size());
        for (const auto& t : run.train) train.push_back({t.recording_id, t.question_id, t.label, *waveform(t.recording_id)});
        egra::LabelSpace labels(run.question_set);
        auto result = egra::fine_tune(*backbone, train, labels, args.hparams, run.seed);

        fs::path dir = args.out / run.key();
        egra::save_classifier(result.classifier, dir / "classifier");
        std::ostringstream preds;
        for (const auto& split : run.test) {
          for (const auto* ids : {&split.positive_ids, &split.negative_ids}) {
            for (const auto& id : *ids) {
              auto p = result.classifier.predict(*waveform(id));
              preds << json{{"recording_id", id},
                            {"question", p.question_id},
                            {"verdict", egra::to_string(p.verdict)},
                            {"probabilities", p.probabilities}}
                           .dump()
                    << "\n";
            }
          }
        }
        write_file(dir / "predictions.jsonl", preds.str());
        egra::ExperimentPlan one{{run}};
        write_file(dir / "run.json", egra::to_json(one).dump() + "\n");
        write_file(dir / "training_log.json",
                   json{{"initial_loss", result.log.initial_loss},
                        {"final_loss", result.log.final_loss},
                        {"step_loss", result.log.step_loss}}
                           .dump() + "\n");
        std::lock_guard lock(io_mu);
        std::cout << "[" << ++finished << "/" << runs.size() << "] " << run.key() << " loss "
                  << result.log.initial_loss << " -> " << result.log.final_loss << "\n";
      } catch (...) {
        std::lock_guard lock(io_mu);
        if (!failure) failure = std::current_exception();
        next = runs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, args.jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return 0;
}

int run_infer(const fs::path& classifier_dir, const fs::path& audio) {
  auto classifier = egra::load_classifier(classifier_dir);
  auto w = egra::canonicalize(egra::read_wav(audio));
  auto p = classifier.predict(w);
  std::cout << json{{"question", p.question_id},
                    {"verdict", egra::to_string(p.verdict)},
                    {"class_index", p.class_index},
                    {"probabilities", p.probabilities}}
                   .dump()
            << "\n";
  return 0;
}

int run_eval(const fs::path& runs_dir, const fs::path& out) {
  if (!fs::is_directory(runs_dir)) throw egra::NotFoundError("runs directory not found: " + runs_dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(runs_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "run.json")) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<egra::MetricSample> samples;
  for (const auto& dir : dirs) {
    auto plan = egra::read_plan(dir / "run.json");
    if (plan.runs.size() != 1) throw egra::Error(dir.string() + "/run.json must hold one run");
    std::map<std::string, egra::ClassLabel> preds;
    std::ifstream in(dir / "predictions.jsonl");
    if (!in) throw egra::NotFoundError("missing predictions in " + dir.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = json::parse(line);
      preds[j.at("recording_id").get<std::string>()] = {j.at("question").get<std::string>(),
                                                        egra::verdict_from_string(j.at("verdict").get<std::string>())};
    }
    auto s = egra::evaluate_run(plan.runs[0], preds);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  egra::write_samples(out, samples);
  std::cout << "wrote " << samples.size() << " metric samples from " << dirs.size() << " runs to " << out.string()
            << "\n";
  return 0;
}

int run_rank(const fs::path& results, std::size_t k, const fs::path& csv_out) {
  auto samples = egra::read_samples(results);
  auto rows = egra::rank_top_k(egra::aggregate(samples), k);
  std::string csv = egra::report::top_k_csv(rows);
  if (!csv_out.empty()) write_file(csv_out, csv);
  std::cout << csv;
  return 0;
}

// ---- baseline / cost / report ----------------------------------------------------------

int run_baseline(const fs::path& corpus_path, const fs::path& transcripts, const std::string& model,
                 const std::string& runner, const fs::path& csv_out) {
  auto loc = egra::open_corpus(corpus_path);
  auto kept = egra::apply_policy(loc.corpus, egra::ConsensusPolicy::kConsensus);
  std::unique_ptr<egra::Transcriber> transcriber;
  if (!transcripts.empty()) {
    transcriber = std::make_unique<egra::ReplayTranscriber>(egra::ReplayTranscriber::from_file(transcripts));
  } else {
    if (runner.empty())
      throw egra::InvalidArgumentError("--model needs --runner <command> that prints a transcript for "
                                       "'<command> <checkpoint-id> <wav>'");
    transcriber = std::make_unique<egra::CommandTranscriber>(runner, model, loc.audio_root);
  }
  auto run = egra::run_baseline(loc.corpus, kept, *transcriber);
  for (const auto& f : run.failures) std::cerr << "egra: transcription failed: " << f << "\n";
  auto report = egra::exact_match_accuracy(run.records);
  std::string csv = egra::report::asr_csv(report);
  if (!csv_out.empty()) write_file(csv_out, csv);
  std::cout << csv;
  return 0;
}

int run_cost(const std::string& model, std::size_t runs, std::size_t steps, const fs::path& out) {
  auto encoder = egra::make_encoder(model, 0);
  egra::Rng rng(7);
  std::vector<egra::TrainExample> train;
  for (int i = 0; i < 16; ++i) {
    egra::synth::ToneSpec spec{i % 2 ? 1200.0 : 500.0, 4.0, 0.5, 0.05};
    auto samples = egra::synth::tone(spec, rng);
    egra::DecodedAudio a{samples, egra::kCanonicalRateHz, 1};
    train.push_back({"probe" + std::to_string(i), "q", i % 2 ? egra::Verdict::kIncorrect : egra::Verdict::kCorrect,
                     egra::canonicalize(a)});
  }
  egra::TrainHyperparams hp;
  hp.total_steps = steps;
  auto report = egra::measure_cost(*encoder, hp, train, train.front().waveform, runs);
  json j{{"model", report.encoder_id},
         {"hardware", report.hardware},
         {"total_steps", report.total_steps},
         {"train_seconds", report.train_seconds},
         {"infer_seconds", report.infer_seconds},
         {"mean_train_seconds", report.mean_train_seconds()},
         {"mean_infer_seconds", report.mean_infer_seconds()}};
  if (!out.empty()) write_file(out, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

egra::CostReport read_cost(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw egra::NotFoundError("cost file not found: " + path.string());
  auto j = json::parse(in);
  egra::CostReport r;
  r.encoder_id = j.at("model").get<std::string>();
  r.hardware = j.at("hardware").get<std::string>();
  r.total_steps = j.at("total_steps").get<std::size_t>();
  r.train_seconds = j.at("train_seconds").get<std::vector<double>>();
  r.infer_seconds = j.at("infer_seconds").get<std::vector<double>>();
  return r;
}

struct ReportArgs {
  fs::path results, out, corpus, judgments, transcripts;
  std::vector<fs::path> cost;
  std::string figures = "all";
  std::size_t k = 5;
};

int run_report(const ReportArgs& args) {
  using egra::report::FigureKind;
  std::vector<FigureKind> kinds;
  if (args.figures == "all") {
    kinds = {FigureKind::kFprFnrScatter, FigureKind::kDeBoxplotLimited, FigureKind::kPerQuestionBoxplot};
    if (!args.corpus.empty()) kinds.push_back(FigureKind::kDistributionBars);
    if (!args.corpus.empty() && !args.judgments.empty()) kinds.push_back(FigureKind::kAgreementBars);
  } else {
    for (const auto& name : split_list(args.figures)) kinds.push_back(egra::report::parse_figure_kind(name));
  }
  auto wants = [&](FigureKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };

  egra::report::Tables tables;
  std::vector<egra::MetricSample> samples;
  if (!args.results.empty()) samples = egra::read_samples(args.results);
  std::optional<egra::CorpusLocation> loc;
  if (!args.corpus.empty()) loc = egra::open_corpus(args.corpus);
  std::vector<egra::ExpertJudgment> judgments;
  if (!args.judgments.empty()) {
    if (!loc) throw egra::InvalidArgumentError("--judgments needs --corpus");
    judgments = egra::read_judgments(args.judgments);
    tables.agreement = egra::report::agreement_table(loc->corpus, judgments);
  }

  if (!samples.empty()) {
    auto aggs = egra::aggregate(samples);
    tables.top_k = egra::rank_top_k(aggs, args.k);
    if (wants(FigureKind::kFprFnrScatter)) egra::report::render_scatter(aggs, args.out / "fpr_fnr_scatter");
    if (wants(FigureKind::kDeBoxplotLimited)) {
      try {
        egra::report::render_limited_data_boxplot(samples, "", args.out / "de_boxplot_limited");
      } catch (const egra::Error& e) {
        std::cerr << "egra: skipping de_boxplot_limited: " << e.what() << "\n";
      }
    }
    if (wants(FigureKind::kPerQuestionBoxplot)) {
      std::vector<egra::ConfigKey> top;
      for (const auto& row : tables.top_k) top.push_back(row.aggregate.key.config);
      auto dist = egra::per_question_breakdown(samples, top);
      egra::report::render_per_question_boxplot(dist, args.out / "per_question_boxplot");
    }
  }
  if (loc && wants(FigureKind::kDistributionBars))
    egra::report::render_distribution_bars(loc->corpus, egra::summarize_distribution(loc->corpus),
                                           args.out / "distribution_bars");
  if (loc && !judgments.empty() && wants(FigureKind::kAgreementBars))
    egra::report::render_agreement_bars(loc->corpus, egra::report::agreement_per_question(loc->corpus, judgments),
                                        args.out / "agreement_bars");
  if (!args.transcripts.empty()) {
    if (!loc) throw egra::InvalidArgumentError("--transcripts needs --corpus");
    auto replay = egra::ReplayTranscriber::from_file(args.transcripts);
    auto run = egra::run_baseline(loc->corpus, egra::apply_policy(loc->corpus, egra::ConsensusPolicy::kConsensus),
                                  replay);
    tables.asr = egra::exact_match_accuracy(run.records);
  }
  for (const auto& c : args.cost) tables.cost.push_back(read_cost(c));
  auto files = egra::report::export_tables(tables, args.out);
  std::cout << "report written to " << args.out.string() << " (tables: " << files.top_k.filename().string()
            << ", ...)\n";
  return 0;
}

// ---- review ------------------------------------------------------------------------------

egra::review::ReviewServer* g_server = nullptr;

int run_review_serve(const fs::path& corpus_path, const std::string& host, int port, std::uint64_t seed,
                     std::size_t per_scenario, const fs::path& log, const fs::path& ui) {
  auto loc = egra::open_corpus(corpus_path);
  auto corpus = std::make_shared<const egra::Corpus>(std::move(loc.corpus));
  egra::review::SessionOptions options{seed, per_scenario, log.empty() ? fs::path("judgments.jsonl") : log};
  auto session = std::make_shared<egra::review::ReviewSession>(corpus, options);
  std::optional<fs::path> static_dir;
  if (!ui.empty()) static_dir = ui;
  egra::review::ReviewServer server(session, loc.audio_root, static_dir);
  if (!server.bind(host, port)) throw egra::Error("cannot bind " + host + ":" + std::to_string(port));
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  auto p = session->progress();
  std::cout << "review session " << session->id() << ": " << p.judged << "/" << p.total
            << " judged; serving on http://" << host << ":" << port << " (log " << options.log_path.string()
            << ")\n"
            << std::flush;
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

// ---- synth ---------------------------------------------------------------------------------

int run_synth(const fs::path& out, std::size_t per_stratum, bool released_shape, double duration, std::uint64_t seed,
              bool audio) {
  egra::Corpus corpus = released_shape ? egra::synth::make_corpus(egra::synth::released_counts(), duration)
                                     : egra::synth::make_uniform_corpus(per_stratum, duration);
  fs::create_directories(out);
  egra::write_manifest(out / egra::kManifestFileName, corpus);
  if (audio) egra::synth::write_tone_audio(corpus, out, seed);
  std::cout << "wrote synthetic corpus of " << corpus.size() << " recordings to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"egra: consensus labeling, fine-tuning experiments and evaluation for early-grade reading assessment"};
  app.require_subcommand(1);
  std::function<int()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and canonicalize its audio");
  static fs::path manifest, audio_root, out, corpus, judgments, transcripts, plan, classifier, audio, runs, results, log, ui;
  static int jobs = 1;
  ingest->add_option("--manifest", manifest, "Line-delimited JSON manifest")->required();
  ingest->add_option("--audio-root", audio_root, "Directory audio paths are relative to")->required();
  ingest->add_option("--out", out, "Output corpus directory")->required();
  ingest->add_option("--jobs", jobs, "Parallel workers");
  ingest->callback([&] { action = [] { return run_ingest(manifest, audio_root, out, jobs); }; });

  // consensus
  static std::string policy = "consensus";
  auto* consensus = app.add_subcommand("consensus", "Apply a retention policy and write the retained subset");
  consensus->add_option("--corpus", corpus, "Corpus directory or manifest")->required();
  consensus->add_option("--policy", policy, "all | consensus | consensus+1i | consensus+1c");
  consensus->add_option("--out", out, "Output subset (JSONL)")->required();
  consensus->callback([&] { action = [] { return run_consensus(corpus, policy, out); }; });

  // validate
  static std::uint64_t seed = 0;
  static std::size_t per_scenario = 10;
  static bool as_json = false;
  auto* validate = app.add_subcommand("validate", "Expert validation set sampling and reporting");
  validate->require_subcommand(1);
  auto* vsample = validate->add_subcommand("sample", "Draw the stratified blind validation set");
  vsample->add_option("--corpus", corpus)->required();
  vsample->add_option("--seed", seed);
  vsample->add_option("--per-scenario", per_scenario, "Recordings per (question, scenario)");
  vsample->add_option("--out", out)->required();
  vsample->callback([&] { action = [] { return run_validate_sample(corpus, seed, per_scenario, out); }; });
  auto* vreport = validate->add_subcommand("report", "Agreement between expert and markers per policy");
  vreport->add_option("--corpus", corpus)->required();
  vreport->add_option("--judgments", judgments)->required();
  vreport->add_flag("--json", as_json, "Print the JSON report");
  vreport->callback([&] { action = [] { return run_validate_report(corpus, judgments, as_json); }; });

  // plan
  static std::string models = "tiny", set_sizes = "1", grid = "full";
  static std::size_t replicates = 5;
  auto* plan_cmd = app.add_subcommand("plan", "Build the experiment plan");
  plan_cmd->add_option("--corpus", corpus)->required();
  plan_cmd->add_option("--models", models, "Comma-separated checkpoint ids");
  plan_cmd->add_option("--set-sizes", set_sizes, "Comma-separated question-set sizes");
  plan_cmd->add_option("--grid", grid, "'full' or cells like 50x50,300x200");
  plan_cmd->add_option("--seed", seed);
  plan_cmd->add_option("--replicates", replicates);
  plan_cmd->add_option("--out", out)->required();
  plan_cmd->callback([&] { action = [] { return run_plan(corpus, models, set_sizes, grid, seed, replicates, out); }; });

  // train
  static TrainArgs targs;
  auto* train = app.add_subcommand("train", "Fine-tune every planned run of one model");
  train->add_option("--plan", targs.plan)->required();
  train->add_option("--corpus", targs.corpus)->required();
  train->add_option("--model", targs.model, "Checkpoint id")->required();
  train->add_option("--out", targs.out)->required();
  train->add_option("--lr", targs.hparams.learning_rate);
  train->add_option("--steps", targs.hparams.total_steps);
  train->add_option("--batch-size", targs.hparams.batch_size);
  train->add_option("--grad-accumulation", targs.hparams.grad_accumulation);
  train->add_option("--limit", targs.limit, "Only the first N runs");
  train->add_option("--jobs", targs.jobs);
  train->callback([&] { action = [] { return run_train(targs); }; });

  auto* infer = app.add_subcommand("infer", "Classify one recording");
  infer->add_option("--classifier", classifier)->required();
  infer->add_option("--audio", audio)->required();
  infer->callback([&] { action = [] { return run_infer(classifier, audio); }; });

  auto* eval = app.add_subcommand("eval", "Confusion-matrix metrics for trained runs");
  eval->add_option("--runs", runs)->required();
  eval->add_option("--out", out)->required();
  eval->callback([&] { action = [] { return run_eval(runs, out); }; });

  static std::size_t k = 5;
  auto* rank = app.add_subcommand("rank", "Top-k configurations per model with significance flags");
  rank->add_option("--results", results)->required();
  rank->add_option("--k", k);
  rank->add_option("--csv", out);
  rank->callback([&] { action = [] { return run_rank(results, k, out); }; });

  static std::string model, runner;
  auto* baseline = app.add_subcommand("baseline", "Exact-match speech-to-text baseline");
  baseline->add_option("--corpus", corpus)->required();
  auto* tr_opt = baseline->add_option("--transcripts", transcripts, "Replay file");
  auto* model_opt = baseline->add_option("--model", model, "Checkpoint id for an external runner");
  tr_opt->excludes(model_opt);
  baseline->add_option("--runner", runner, "Command run as '<runner> <checkpoint> <wav>'");
  baseline->add_option("--out", out, "Table CSV");
  baseline->callback([&] {
    if (transcripts.empty() && model.empty()) throw CLI::ValidationError("baseline", "need --transcripts or --model");
    action = [] { return run_baseline(corpus, transcripts, model, runner, out); };
  });

  static std::size_t cost_runs = 10, cost_steps = 1000;
  auto* cost = app.add_subcommand("cost", "Time training and inference for a backbone");
  cost->add_option("--model", model)->required();
  cost->add_option("--runs", cost_runs);
  cost->add_option("--steps", cost_steps);
  cost->add_option("--out", out);
  cost->callback([&] { action = [] { return run_cost(model, cost_runs, cost_steps, out); }; });

  static ReportArgs rargs;
  auto* report = app.add_subcommand("report", "Render figures and export tables");
  report->add_option("--results", rargs.results);
  report->add_option("--figures", rargs.figures, "'all' or comma list of figure kinds");
  report->add_option("--out", rargs.out)->required();
  report->add_option("--corpus", rargs.corpus);
  report->add_option("--judgments", rargs.judgments);
  report->add_option("--transcripts", rargs.transcripts);
  report->add_option("--cost", rargs.cost, "Cost JSON files from 'egra cost'");
  report->add_option("--k", rargs.k);
  report->callback([&] { action = [] { return run_report(rargs); }; });

  static std::string host = "127.0.0.1";
  static int port = 8080;
  auto* review = app.add_subcommand("review", "Expert review service");
  review->require_subcommand(1);
  auto* serve = review->add_subcommand("serve", "Serve the blinded validation session over HTTP");
  serve->add_option("--corpus", corpus)->required();
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--seed", seed);
  serve->add_option("--per-scenario", per_scenario);
  serve->add_option("--log", log, "Judgment log (default judgments.jsonl)");
  serve->add_option("--ui", ui, "Static UI bundle directory");
  serve->callback([&] {
    action = [] { return run_review_serve(corpus, host, port, seed, per_scenario, log, ui); };
  });

  static std::size_t per_stratum = 20;
  static bool released_shape = false, no_audio = false;
  static double duration = 1.0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic tone corpus for demos");
  synth->add_option("--out", out)->required();
  synth->add_option("--per-stratum", per_stratum);
  synth->add_flag("--released-counts", released_shape, "Use the released corpus' label counts");
  synth->add_option("--duration", duration);
  synth->add_option("--seed", seed);
  synth->add_flag("--no-audio", no_audio);
  synth->callback([&] {
    action = [] { return run_synth(out, per_stratum, released_shape, duration, seed, !no_audio); };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : 0;
  } catch (const std::exception& e) {
    std::cerr << "egra: error: " << e.what() << "\n";
    return 1;
  }
}
