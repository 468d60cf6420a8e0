// src/report.cc

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

#include "egra/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace egra::report {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) { return format_fixed(v, 2); }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Fixed-layout SVG canvas with one linear plot area.
class Svg {
 public:
  static constexpr double kWidth = 720, kHeight = 480;
  static constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 70;

  Svg(std::string title, double x_min, double x_max, double y_min, double y_max)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    if (x_max_ <= x_min_) x_max_ = x_min_ + 1.0;
    if (y_max_ <= y_min_) y_max_ = y_min_ + 1.0;
    body_ << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
          << "font-family=\"DejaVu Sans\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  }

  double x(double v) const { return kLeft + (v - x_min_) / (x_max_ - x_min_) * (kWidth - kLeft - kRight); }
  double y(double v) const {
    return kHeight - kBottom - (v - y_min_) / (y_max_ - y_min_) * (kHeight - kTop - kBottom);
  }

  void axes(const std::string& x_label, const std::string& y_label, int y_ticks = 5) {
    line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "#000");
    line(kLeft, kTop, kLeft, kHeight - kBottom, "#000");
    for (int i = 0; i <= y_ticks; ++i) {
      double v = y_min_ + (y_max_ - y_min_) * i / y_ticks;
      line(kLeft - 4, y(v), kLeft, y(v), "#000");
      text(kLeft - 8, y(v) + 4, num(v), "end", 11);
    }
    text(kWidth / 2, kHeight - 15, x_label, "middle", 13);
    body_ << "<text x=\"18\" y=\"" << num(kHeight / 2) << "\" transform=\"rotate(-90 18 "
          << num(kHeight / 2) << ")\" text-anchor=\"middle\" font-family=\"DejaVu Sans\" "
          << "font-size=\"13\">" << xml_escape(y_label) << "</text>\n";
  }

  void x_ticks(int n) {
    for (int i = 0; i <= n; ++i) {
      double v = x_min_ + (x_max_ - x_min_) * i / n;
      line(x(v), kHeight - kBottom, x(v), kHeight - kBottom + 4, "#000");
      text(x(v), kHeight - kBottom + 18, num(v), "middle", 11);
    }
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\""
          << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"/>\n";
  }

  void rect(double x1, double y1, double w, double h, const std::string& fill, const std::string& stroke) {
    body_ << "<rect x=\"" << num(x1) << "\" y=\"" << num(y1) << "\" width=\"" << num(w) << "\" height=\""
          << num(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill, const std::string& stroke,
              double opacity = 0.6) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r) << "\" fill=\""
          << fill << "\" fill-opacity=\"" << num(opacity) << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double tx, double ty, const std::string& s, const char* anchor, int size) {
    body_ << "<text x=\"" << num(tx) << "\" y=\"" << num(ty) << "\" text-anchor=\"" << anchor
          << "\" font-family=\"DejaVu Sans\" font-size=\"" << size << "\">" << xml_escape(s) << "</text>\n";
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
        << body_.str() << "</svg>\n";
  }

 private:
  double x_min_, x_max_, y_min_, y_max_;
  std::ostringstream body_;
};

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

FigureFiles files_for(const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  auto svg = stem;
  auto csv = stem;
  svg += ".svg";
  csv += ".csv";
  return {svg, csv};
}

std::string config_label(const ConfigKey& c) {
  return c.model_id + " set " + std::to_string(c.set_size) + " " + std::to_string(c.n_correct) + "/" +
         std::to_string(c.n_incorrect);
}

void draw_boxes(Svg& svg, const std::vector<BoxGroup>& groups, const std::vector<std::string>& colors) {
  const double slot = (Svg::kWidth - Svg::kLeft - Svg::kRight) / static_cast<double>(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& b = groups[i].box;
    const double cx = Svg::kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(30.0, slot * 0.3);
    const std::string& color = colors[i % colors.size()];
    svg.line(cx, svg.y(b.whisker_low), cx, svg.y(b.q1), "#000");
    svg.line(cx, svg.y(b.q3), cx, svg.y(b.whisker_high), "#000");
    svg.line(cx - half / 2, svg.y(b.whisker_low), cx + half / 2, svg.y(b.whisker_low), "#000");
    svg.line(cx - half / 2, svg.y(b.whisker_high), cx + half / 2, svg.y(b.whisker_high), "#000");
    svg.rect(cx - half, svg.y(b.q3), 2 * half, std::max(0.0, svg.y(b.q1) - svg.y(b.q3)), color, "#000");
    svg.line(cx - half, svg.y(b.median), cx + half, svg.y(b.median), "#000", 2.0);
    for (double o : b.outliers) svg.circle(cx, svg.y(o), 2.5, "none", "#000", 1.0);
    svg.text(cx, Svg::kHeight - Svg::kBottom + 16, groups[i].label, "middle", 10);
  }
}

std::string box_csv(const std::vector<BoxGroup>& groups) {
  std::ostringstream os;
  os << "group,n,min,whisker_low,q1,median,q3,whisker_high,max\n";
  for (const auto& g : groups) {
    const auto& b = g.box;
    os << csv_field(g.label) << ',' << b.n << ',' << format_percent(b.min) << ','
       << format_percent(b.whisker_low) << ',' << format_percent(b.q1) << ',' << format_percent(b.median)
       << ',' << format_percent(b.q3) << ',' << format_percent(b.whisker_high) << ','
       << format_percent(b.max) << '\n';
  }
  return os.str();
}

}  // namespace

std::string_view to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::kFprFnrScatter: return "fpr_fnr_scatter";
    case FigureKind::kDeBoxplotLimited: return "de_boxplot_limited";
    case FigureKind::kPerQuestionBoxplot: return "per_question_boxplot";
    case FigureKind::kDistributionBars: return "distribution_bars";
    case FigureKind::kAgreementBars: return "agreement_bars";
  }
  return "?";
}

FigureKind parse_figure_kind(std::string_view name) {
  for (auto k : {FigureKind::kFprFnrScatter, FigureKind::kDeBoxplotLimited, FigureKind::kPerQuestionBoxplot,
                 FigureKind::kDistributionBars, FigureKind::kAgreementBars})
    if (to_string(k) == name) return k;
  throw InvalidArgumentError("unknown figure kind '" + std::string(name) + "'");
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  if (std::string_view(buf) == "-0.00" || std::string_view(buf) == "-0.0") return buf + 1;
  return buf;
}

std::string format_percent(double fraction) { return format_fixed(100.0 * fraction, 2); }

std::string format_share(std::size_t part, std::size_t total) {
  if (total == 0) return "";
  const std::size_t permille = part * 1000 / total;
  return std::to_string(permille / 10) + "." + std::to_string(permille % 10);
}

ScatterFigure render_scatter(const std::vector<Aggregate>& aggregates, const std::filesystem::path& stem) {
  if (aggregates.empty()) throw InvalidArgumentError("scatter needs at least one configuration");
  ScatterFigure fig;
  fig.files = files_for(stem);

  std::map<std::string, std::size_t> best;  // model -> index of best mean DE
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    const auto& a = aggregates[i];
    if (a.n == 0) throw InvalidArgumentError("configuration " + config_label(a.key.config) + " has no std");
    auto [it, fresh] = best.emplace(a.key.config.model_id, i);
    if (!fresh && a[Metric::kDe].mean > aggregates[it->second][Metric::kDe].mean) it->second = i;
  }

  double max_rate = 0.0;
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    const auto& a = aggregates[i];
    ScatterDot d;
    d.config = a.key.config;
    d.fpr = a[Metric::kFpr].mean;
    d.fnr = a[Metric::kFnr].mean;
    d.de = a[Metric::kDe].mean;
    d.pooled_std = std::sqrt((a[Metric::kFpr].std * a[Metric::kFpr].std + a[Metric::kFnr].std * a[Metric::kFnr].std) / 2.0);
    d.radius = std::sqrt((kMinDotArea + kDotAreaPerStd * d.pooled_std) / M_PI);
    d.best_de = best.at(a.key.config.model_id) == i;
    max_rate = std::max({max_rate, d.fpr, d.fnr});
    fig.dots.push_back(d);
  }

  const double top = max_rate > 0 ? std::ceil(max_rate * 20.0) / 20.0 : 0.05;
  Svg svg("FPR vs FNR per configuration", 0.0, top, 0.0, top);
  svg.axes("FPR", "FNR");
  svg.x_ticks(5);
  std::vector<std::string> models;
  for (const auto& [m, _] : best) models.push_back(m);
  auto color_of = [&](const std::string& m) {
    auto idx = static_cast<std::size_t>(std::find(models.begin(), models.end(), m) - models.begin());
    return std::string(kPalette[idx % kPaletteSize]);
  };
  for (const auto& d : fig.dots)
    svg.circle(svg.x(d.fpr), svg.y(d.fnr), d.radius, color_of(d.config.model_id), d.best_de ? "#000" : "none",
               d.best_de ? 0.95 : 0.45);
  for (std::size_t i = 0; i < models.size(); ++i) {
    double ly = Svg::kTop + 16.0 * static_cast<double>(i);
    svg.circle(Svg::kWidth - 150, ly, 5, color_of(models[i]), "none", 0.9);
    svg.text(Svg::kWidth - 140, ly + 4, models[i], "start", 11);
  }
  svg.save(fig.files.svg);

  std::ostringstream csv;
  csv << "model,set,correct,incorrect,fpr_mean,fnr_mean,de_mean,pooled_std,radius,best_de\n";
  for (const auto& d : fig.dots)
    csv << csv_field(d.config.model_id) << ',' << d.config.set_size << ',' << d.config.n_correct << ','
        << d.config.n_incorrect << ',' << format_percent(d.fpr) << ',' << format_percent(d.fnr) << ','
        << format_percent(d.de) << ',' << format_percent(d.pooled_std) << ',' << num(d.radius) << ','
        << (d.best_de ? 1 : 0) << '\n';
  write_text(fig.files.csv, csv.str());
  return fig;
}

BoxFigure render_limited_data_boxplot(std::span<const MetricSample> samples, const std::string& model,
                                      const std::filesystem::path& stem) {
  std::map<std::size_t, std::vector<double>> by_set;
  for (const auto& s : samples) {
    if (!model.empty() && s.config.model_id != model) continue;
    auto limited = [](std::size_t n) { return n == 50 || n == 100; };
    if (!limited(s.config.n_correct) || !limited(s.config.n_incorrect)) continue;
    by_set[s.config.set_size].push_back(s.rates.de);
  }
  if (by_set.empty()) throw Error("no samples trained with 50 or 100 examples per class");

  BoxFigure fig;
  fig.files = files_for(stem);
  for (auto& [set, values] : by_set) fig.groups.push_back({"set " + std::to_string(set), stats::box_stats(values)});

  Svg svg("DE under limited data" + (model.empty() ? std::string() : " (" + model + ")"), 0, 1, 0.0, 1.0);
  svg.axes("questions per model", "DE");
  draw_boxes(svg, fig.groups, {kPalette[0]});
  svg.save(fig.files.svg);
  write_text(fig.files.csv, box_csv(fig.groups));
  return fig;
}

BoxFigure render_per_question_boxplot(std::span<const QuestionDistribution> distributions,
                                      const std::filesystem::path& stem) {
  if (distributions.empty()) throw InvalidArgumentError("empty per-question selection");
  BoxFigure fig;
  fig.files = files_for(stem);
  std::vector<std::string> models, colors;
  for (const auto& d : distributions) {
    fig.groups.push_back({d.model_id + ":" + d.question_id, d.de});
    if (std::find(models.begin(), models.end(), d.model_id) == models.end()) models.push_back(d.model_id);
    auto idx = static_cast<std::size_t>(std::find(models.begin(), models.end(), d.model_id) - models.begin());
    colors.emplace_back(kPalette[idx % kPaletteSize]);
  }
  Svg svg("Per-question DE of the top configurations", 0, 1, 0.0, 1.0);
  svg.axes("model:question", "DE");
  draw_boxes(svg, fig.groups, colors);
  svg.save(fig.files.svg);
  write_text(fig.files.csv, box_csv(fig.groups));
  return fig;
}

FigureFiles render_distribution_bars(const Corpus& corpus, const DistributionSummary& summary,
                                     const std::filesystem::path& stem) {
  if (summary.counts.empty()) throw InvalidArgumentError("empty distribution summary");
  auto files = files_for(stem);
  std::size_t max_total = 1;
  for (const auto& [_, c] : summary.counts) max_total = std::max(max_total, c[0] + c[1] + c[2] + c[3]);

  Svg svg("Marking scenarios per question", 0, 1, 0, static_cast<double>(max_total));
  svg.axes("question", "recordings");
  const auto& qs = corpus.questions();
  const double slot = (Svg::kWidth - Svg::kLeft - Svg::kRight) / static_cast<double>(qs.size());
  static const char* kScenarioColors[] = {"#2ca02c", "#98df8a", "#ff9896", "#d62728"};
  std::ostringstream csv;
  csv << "question,all_correct,mostly_correct,mostly_incorrect,all_incorrect\n";
  for (std::size_t i = 0; i < qs.size(); ++i) {
    auto it = summary.counts.find(qs[i].id);
    if (it == summary.counts.end()) continue;
    const auto& c = it->second;
    csv << csv_field(qs[i].id) << ',' << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[3] << '\n';
    double base = 0;
    const double x0 = Svg::kLeft + slot * static_cast<double>(i) + slot * 0.15;
    for (std::size_t s = 0; s < kScenarioCount; ++s) {
      double top = base + static_cast<double>(c[s]);
      svg.rect(x0, svg.y(top), slot * 0.7, svg.y(base) - svg.y(top), kScenarioColors[s], "none");
      base = top;
    }
    svg.text(x0 + slot * 0.35, Svg::kHeight - Svg::kBottom + 16, qs[i].text, "middle", 11);
  }
  svg.save(files.svg);
  write_text(files.csv, csv.str());
  return files;
}

std::vector<Table1Row> agreement_table(const Corpus& corpus, std::span<const ExpertJudgment> judgments) {
  auto verdicts = latest_verdicts(judgments);
  std::vector<Table1Row> rows;
  for (auto policy : kAllPolicies) {
    Table1Row row;
    row.policy = policy;
    row.agreement = tally_agreement(corpus, verdicts, policy);
    RetainedSet kept = apply_policy(corpus, policy);
    row.retained = kept.items.size();
    row.total = kept.considered;
    rows.push_back(row);
  }
  return rows;
}

QuestionAgreement agreement_per_question(const Corpus& corpus, std::span<const ExpertJudgment> judgments) {
  auto verdicts = latest_verdicts(judgments);
  std::set<std::string> judged_questions;
  for (const auto& [id, _] : verdicts) judged_questions.insert(corpus.recording(id).question_id);
  QuestionAgreement out;
  for (auto policy : kAllPolicies)
    for (const auto& q : corpus.questions())
      if (judged_questions.count(q.id)) out[policy][q.id] = tally_agreement(corpus, verdicts, policy, &q.id);
  return out;
}

FigureFiles render_agreement_bars(const Corpus& corpus, const QuestionAgreement& agreement,
                                  const std::filesystem::path& stem) {
  if (agreement.empty()) throw InvalidArgumentError("no agreement data to plot");
  auto files = files_for(stem);
  Svg svg("Expert agreement per question", 0, 1, 0.0, 1.0);
  svg.axes("question", "agreement rate");
  const auto& qs = corpus.questions();
  const double slot = (Svg::kWidth - Svg::kLeft - Svg::kRight) / static_cast<double>(qs.size());
  const double bar = slot * 0.8 / static_cast<double>(kAllPolicies.size());
  std::ostringstream csv;
  csv << "question";
  for (auto p : kAllPolicies) csv << ',' << csv_field(std::string(policy_display_name(p)));
  csv << '\n';
  for (std::size_t i = 0; i < qs.size(); ++i) {
    bool any = false;
    std::ostringstream row;
    row << csv_field(qs[i].id);
    for (std::size_t p = 0; p < kAllPolicies.size(); ++p) {
      row << ',';
      auto pit = agreement.find(kAllPolicies[p]);
      if (pit == agreement.end()) continue;
      auto qit = pit->second.find(qs[i].id);
      if (qit == pit->second.end()) continue;
      any = true;
      if (auto rate = qit->second.rate_or_null()) {
        row << format_percent(*rate);
        double x0 = Svg::kLeft + slot * static_cast<double>(i) + slot * 0.1 + bar * static_cast<double>(p);
        svg.rect(x0, svg.y(*rate), bar, svg.y(0.0) - svg.y(*rate), kPalette[p], "none");
      }
    }
    if (!any) continue;
    csv << row.str() << '\n';
    svg.text(Svg::kLeft + slot * (static_cast<double>(i) + 0.5), Svg::kHeight - Svg::kBottom + 16, qs[i].text,
             "middle", 11);
  }
  svg.save(files.svg);
  write_text(files.csv, csv.str());
  return files;
}

std::string agreement_csv(std::span<const Table1Row> rows) {
  std::ostringstream os;
  os << "condition,agreement_rate,agreed,judged,recordings,share\n";
  for (const auto& r : rows) {
    auto rate = r.agreement.rate_or_null();
    os << csv_field(std::string(policy_display_name(r.policy))) << ',' << (rate ? format_percent(*rate) : "")
       << ',' << r.agreement.agreed << ',' << r.agreement.retained << ',' << r.retained << ','
       << format_share(r.retained, r.total) << '\n';
  }
  return os.str();
}

std::string cost_csv(std::span<const CostReport> rows) {
  std::ostringstream os;
  os << "model,training_time_s,inference_time_s,steps,runs,hardware\n";
  for (const auto& r : rows)
    os << csv_field(r.encoder_id) << ',' << num(r.mean_train_seconds()) << ',' << num(r.mean_infer_seconds())
       << ',' << r.total_steps << ',' << r.train_seconds.size() << ',' << csv_field(r.hardware) << '\n';
  return os.str();
}

std::string top_k_csv(std::span<const RankedRow> rows) {
  std::ostringstream os;
  os << "model,set,correct,incorrect,de_mean,de_std,fpr_mean,fpr_std,fnr_mean,fnr_std,"
        "highlight_de,highlight_fpr,highlight_fnr\n";
  for (const auto& r : rows) {
    const auto& a = r.aggregate;
    os << csv_field(a.key.config.model_id) << ',' << a.key.config.set_size << ',' << a.key.config.n_correct
       << ',' << a.key.config.n_incorrect;
    for (auto m : kAllMetrics) os << ',' << format_percent(a[m].mean) << ',' << format_percent(a[m].std);
    for (auto m : kAllMetrics) os << ',' << (r.highlight[static_cast<std::size_t>(m)] ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

std::string asr_csv(const std::optional<AccuracyReport>& report) {
  std::ostringstream os;
  os << "label,samples,correct,accuracy\n";
  if (!report) return os.str();
  for (const auto& q : report->per_question)
    os << csv_field(q.expected_text) << ',' << q.samples << ',' << q.correct << ',' << format_percent(q.accuracy())
       << '\n';
  os << "overall," << report->samples << ',' << report->correct << ',' << format_percent(report->overall()) << '\n';
  return os.str();
}

TableFiles export_tables(const Tables& tables, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  TableFiles files{out_dir / "table1_agreement.csv", out_dir / "table2_cost.csv", out_dir / "table3_top_k.csv",
                   out_dir / "table4_asr.csv"};
  write_text(files.agreement, agreement_csv(tables.agreement));
  write_text(files.cost, cost_csv(tables.cost));
  write_text(files.top_k, top_k_csv(tables.top_k));
  write_text(files.asr, asr_csv(tables.asr));
  return files;
}

}  // namespace egra::report
