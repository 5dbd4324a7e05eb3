// Copyright 2026 The SwitchHit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "switchhit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "switchhit/error.hpp"
#include "util.hpp"

namespace switchhit {

bool is_correct(const MatchCandidate& candidate, std::size_t gt_index,
                std::size_t tolerance) noexcept {
  const std::size_t r = candidate.reference_index;
  const std::size_t diff = r > gt_index ? r - gt_index : gt_index - r;
  return diff <= tolerance;
}

std::vector<PRPoint> pr_curve(std::span<const ScoredLabel> results) {
  if (results.empty()) throw Error(ErrorCode::kInvalidArgument, "empty result list");
  std::vector<ScoredLabel> sorted(results.begin(), results.end());
  for (const auto& r : sorted) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "confidence outside [0,1]");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.confidence > b.confidence; });

  std::vector<double> thresholds;
  thresholds.reserve(sorted.size() + 2);
  thresholds.push_back(1.0);
  for (const auto& r : sorted) thresholds.push_back(r.confidence);
  thresholds.push_back(0.0);
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double total = static_cast<double>(sorted.size());
  std::vector<PRPoint> curve;
  curve.reserve(thresholds.size());
  std::size_t accepted = 0, correct = 0;
  for (double t : thresholds) {
    while (accepted < sorted.size() && sorted[accepted].confidence >= t) {
      if (sorted[accepted].correct) ++correct;
      ++accepted;
    }
    const double precision =
        accepted == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(accepted);
    curve.push_back({t, precision, static_cast<double>(correct) / total});
  }
  return curve;
}

namespace {

std::vector<PRPoint> dedup_by_recall(std::span<const PRPoint> curve) {
  std::vector<PRPoint> pts(curve.begin(), curve.end());
  std::stable_sort(pts.begin(), pts.end(),
                   [](const PRPoint& a, const PRPoint& b) { return a.recall < b.recall; });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const PRPoint& a, const PRPoint& b) {
                          return a.recall == b.recall && a.precision == b.precision;
                        }),
            pts.end());
  return pts;
}

double trapezoid(const std::vector<PRPoint>& pts) {
  double area = 0.0;
  if (pts.front().recall > 0.0) area += pts.front().recall * pts.front().precision;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].recall - pts[i - 1].recall) * (pts[i].precision + pts[i - 1].precision) / 2.0;
  }
  return std::clamp(area, 0.0, 1.0);
}

}  // namespace

double auc(std::span<const PRPoint> curve) {
  const auto pts = dedup_by_recall(curve);
  if (pts.size() < 2) throw Error(ErrorCode::kInvalidArgument, "AUC needs at least two distinct points");
  return trapezoid(pts);
}

TechniqueResults run_all(const DatasetManifest& manifest,
                         const std::vector<std::string>& combination,
                         const TechniqueMap& techniques) {
  TechniqueResults out;
  for (const auto& id : combination) {
    const auto it = techniques.find(id);
    if (it == techniques.end() || !it->second) {
      throw Error(ErrorCode::kConfig, "missing matcher index for " + id);
    }
    auto& column = out[id];
    column.reserve(manifest.queries.size());
    for (const auto& q : manifest.queries) column.push_back(it->second->best_match(*q.image));
  }
  return out;
}

namespace {

CurveSummary summarize(std::string name, const std::vector<ScoredLabel>& labels) {
  CurveSummary s;
  s.name = std::move(name);
  s.correct = static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const ScoredLabel& l) { return l.correct; }));
  s.curve = pr_curve(labels);
  // A curve that collapses to one point (every confidence equal to 1) keeps
  // its precision down to recall 0.
  s.auc = trapezoid(dedup_by_recall(s.curve));
  return s;
}

}  // namespace

EvalReport build_report(const std::vector<SwitchTrace>& traces,
                        const std::vector<std::string>& combination,
                        const TechniqueResults& results, const DatasetManifest& manifest,
                        double threshold) {
  const std::size_t n = manifest.queries.size();
  if (n == 0) throw Error(ErrorCode::kDataset, "empty dataset");
  if (traces.size() != n) throw Error(ErrorCode::kDataset, "trace/query count mismatch");

  EvalReport report;
  report.n_queries = n;
  report.threshold = threshold;
  const std::size_t tol = manifest.tolerance;

  for (const auto& id : combination) {
    const auto it = results.find(id);
    if (it == results.end() || it->second.size() != n) {
      throw Error(ErrorCode::kDataset, "result/query count mismatch for " + id);
    }
    std::vector<ScoredLabel> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = it->second[i];
      labels.push_back({c.score, is_correct(c, manifest.queries[i].gt, tol)});
    }
    report.techniques.push_back(summarize(id, labels));
  }

  std::vector<ScoredLabel> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = traces[i];
    if (t.attempts.empty() || t.accepted_attempt >= t.attempts.size()) {
      throw Error(ErrorCode::kDataset, "trace " + std::to_string(i) + " has no accepted attempt");
    }
    labels.push_back({t.accepted().posterior,
                      is_correct(t.accepted_candidate(), manifest.queries[i].gt, tol)});
    report.switch_pattern.push_back(t.accepted_technique());
    ++report.attempts_histogram[t.attempts.size()];
    ++report.accepted_by[t.accepted_technique()];
  }
  report.switchhit = summarize("switchhit", labels);
  return report;
}

std::vector<SwitchTrace> reconstruct_traces(const std::vector<TraceSummary>& summaries,
                                            const TechniqueResults& results,
                                            std::size_t n_queries) {
  if (summaries.size() != n_queries) {
    throw Error(ErrorCode::kDataset, "trace/query count mismatch (" +
                                         std::to_string(summaries.size()) + " traces, " +
                                         std::to_string(n_queries) + " queries)");
  }
  std::vector<SwitchTrace> traces;
  traces.reserve(n_queries);
  for (std::size_t i = 0; i < n_queries; ++i) {
    const auto& s = summaries[i];
    if (s.query_index != i) throw Error(ErrorCode::kDataset, "trace/query count mismatch");
    SwitchTrace t;
    t.query_index = i;
    t.mode = s.rows.front().mode;
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
      const auto& row = s.rows[k];
      const auto it = results.find(row.technique);
      if (it == results.end()) {
        throw Error(ErrorCode::kDataset, "trace names unknown technique " + row.technique);
      }
      const MatchCandidate& c = it->second.at(i);
      if (std::abs(c.score - row.score) > 1e-12) {
        throw Error(ErrorCode::kDataset, "trace score for query " + std::to_string(i) + " (" +
                                             row.technique + ") does not match the matcher output");
      }
      Attempt a;
      a.technique = row.technique;
      a.candidate = c;
      a.bin = row.bin;
      a.posterior = row.posterior;
      t.attempts.push_back(std::move(a));
      if (row.accepted) t.accepted_attempt = k;
    }
    traces.push_back(std::move(t));
  }
  return traces;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["n_queries"] = report.n_queries;
  doc["threshold"] = report.threshold;
  doc["switchhit_correct"] = report.switchhit.correct;
  doc["switchhit_auc"] = report.switchhit.auc;
  doc["techniques"] = nlohmann::ordered_json::array();
  for (const auto& t : report.techniques) {
    doc["techniques"].push_back({{"name", t.name}, {"correct", t.correct}, {"auc", t.auc}});
  }
  doc["accepted_by"] = nlohmann::ordered_json::object();
  for (const auto& [name, count] : report.accepted_by) doc["accepted_by"][name] = count;
  doc["attempts_histogram"] = nlohmann::ordered_json::object();
  for (const auto& [attempts, count] : report.attempts_histogram) {
    doc["attempts_histogram"][std::to_string(attempts)] = count;
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string curve_csv(const std::vector<PRPoint>& curve) {
  std::ostringstream out;
  out << "threshold,precision,recall\n";
  for (const auto& p : curve) {
    out << detail::format_double(p.threshold) << ',' << detail::format_double(p.precision) << ','
        << detail::format_double(p.recall) << '\n';
  }
  return out.str();
}

}  // namespace

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  detail::write_text_file(dir / "report.json", report_to_json(report));
  for (const auto& t : report.techniques) {
    detail::write_text_file(dir / ("pr_" + t.name + ".csv"), curve_csv(t.curve));
  }
  detail::write_text_file(dir / "pr_switchhit.csv", curve_csv(report.switchhit.curve));
  std::ostringstream pattern;
  pattern << "query_index,accepted_technique\n";
  for (std::size_t i = 0; i < report.switch_pattern.size(); ++i) {
    pattern << i << ',' << report.switch_pattern[i] << '\n';
  }
  detail::write_text_file(dir / "switch_pattern.csv", pattern.str());
}

}  // namespace switchhit
