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

#include "switchhit/switching.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "switchhit/error.hpp"
#include "util.hpp"

namespace switchhit {

std::size_t SwitchConfig::attempt_limit() const noexcept {
  return std::min(max_attempts.value_or(combination.size()), combination.size());
}

void SwitchConfig::validate() const {
  if (combination.empty()) throw Error(ErrorCode::kConfig, "combination is empty");
  std::set<std::string> seen;
  for (const auto& id : combination) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kConfig, "duplicate technique in combination: " + id);
    }
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kConfig, "threshold must lie in [0,1]");
  }
  if (max_attempts && *max_attempts == 0) {
    throw Error(ErrorCode::kConfig, "max_attempts must be >= 1");
  }
}

double posterior(const TechniqueProfile& profile, std::size_t bin) {
  const auto& l = profile.likelihood.at(bin);
  const double match = profile.prior_match * l.match;
  const double mismatch = profile.prior_mismatch * l.mismatch;
  return match / (match + mismatch);
}

ComplementarityScore complementarity(const TechniqueProfile& a, const TechniqueProfile& b,
                                     std::size_t bin) {
  const auto& la = a.likelihood.at(bin);
  const auto& lb = b.likelihood.at(bin);
  return {a.technique, b.technique, (la.match * lb.match) / (la.mismatch * lb.mismatch)};
}

const char* acceptance_mode_name(AcceptanceMode mode) noexcept {
  return mode == AcceptanceMode::kThresholdPass ? "threshold-pass" : "max-posterior-fallback";
}

AcceptanceMode parse_acceptance_mode(const std::string& name) {
  if (name == "threshold-pass") return AcceptanceMode::kThresholdPass;
  if (name == "max-posterior-fallback") return AcceptanceMode::kMaxPosteriorFallback;
  throw Error(ErrorCode::kParse, "unknown acceptance mode: " + name);
}

SwitchTrace run_query(std::size_t query_index, const GrayImage& query,
                      const SwitchConfig& config, const ProfileMap& profiles,
                      const TechniqueMap& techniques) {
  config.validate();
  const auto& combo = config.combination;
  for (const auto& id : combo) {
    if (!profiles.contains(id)) throw Error(ErrorCode::kConfig, "missing profile for " + id);
    const auto it = techniques.find(id);
    if (it == techniques.end() || !it->second) {
      throw Error(ErrorCode::kConfig, "missing matcher index for " + id);
    }
  }

  SwitchTrace trace;
  trace.query_index = query_index;
  std::vector<bool> tried(combo.size(), false);
  const std::size_t limit = config.attempt_limit();
  std::size_t current = 0;

  while (true) {
    const std::string& id = combo[current];
    const TechniqueProfile& profile = profiles.at(id);
    Attempt attempt;
    attempt.technique = id;
    attempt.candidate = techniques.at(id)->best_match(query);
    attempt.bin = bin_of(attempt.candidate.score);
    attempt.posterior = posterior(profile, attempt.bin);
    tried[current] = true;

    if (attempt.posterior >= config.threshold) {
      trace.attempts.push_back(std::move(attempt));
      trace.accepted_attempt = trace.attempts.size() - 1;
      trace.mode = AcceptanceMode::kThresholdPass;
      return trace;
    }
    if (trace.attempts.size() + 1 >= limit) {
      trace.attempts.push_back(std::move(attempt));
      break;
    }

    // Rank untried techniques against the one that just failed, at its bin.
    std::vector<std::pair<std::size_t, ComplementarityScore>> ranked;
    for (std::size_t j = 0; j < combo.size(); ++j) {
      if (!tried[j]) ranked.emplace_back(j, complementarity(profile, profiles.at(combo[j]), attempt.bin));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      return x.second.value > y.second.value;
    });
    for (const auto& [j, score] : ranked) attempt.ranking.push_back(score);
    trace.attempts.push_back(std::move(attempt));
    if (ranked.empty()) break;
    current = ranked.front().first;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.attempts.size(); ++i) {
    if (trace.attempts[i].posterior > trace.attempts[best].posterior) best = i;
  }
  trace.accepted_attempt = best;
  trace.mode = AcceptanceMode::kMaxPosteriorFallback;
  return trace;
}

std::vector<SwitchTrace> run_dataset(const DatasetManifest& manifest, const SwitchConfig& config,
                                     const ProfileMap& profiles, const TechniqueMap& techniques) {
  std::vector<SwitchTrace> traces;
  traces.reserve(manifest.queries.size());
  for (std::size_t i = 0; i < manifest.queries.size(); ++i) {
    traces.push_back(run_query(i, *manifest.queries[i].image, config, profiles, techniques));
  }
  return traces;
}

void write_trace_csv(std::ostream& out, const std::vector<SwitchTrace>& traces) {
  out << kTraceCsvHeader << '\n';
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.attempts.size(); ++i) {
      const auto& a = t.attempts[i];
      out << t.query_index << ',' << (i + 1) << ',' << a.technique << ','
          << detail::format_double(a.candidate.score) << ',' << a.bin << ','
          << detail::format_double(a.posterior) << ',' << (i == t.accepted_attempt ? 1 : 0) << ','
          << acceptance_mode_name(t.mode) << '\n';
    }
  }
}

const TraceRow& TraceSummary::accepted() const {
  for (const auto& r : rows) {
    if (r.accepted) return r;
  }
  throw Error(ErrorCode::kSchema, "query " + std::to_string(query_index) + " has no accepted row");
}

namespace {

std::size_t parse_index(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(field, &used);
    if (used != field.size() || field.front() == '-') throw std::invalid_argument(field);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "trace line " + std::to_string(line) + ": bad integer '" + field + "'");
  }
}

double parse_real(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "trace line " + std::to_string(line) + ": bad number '" + field + "'");
  }
}

}  // namespace

std::vector<TraceSummary> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw Error(ErrorCode::kSchema, "trace CSV header mismatch");
  }
  std::vector<TraceSummary> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) {
      throw Error(ErrorCode::kParse, "trace line " + std::to_string(line_no) + ": expected 8 columns");
    }
    TraceRow row;
    row.query_index = parse_index(f[0], line_no);
    row.attempt_ordinal = parse_index(f[1], line_no);
    row.technique = f[2];
    row.score = parse_real(f[3], line_no);
    row.bin = parse_index(f[4], line_no);
    row.posterior = parse_real(f[5], line_no);
    if (f[6] != "0" && f[6] != "1") {
      throw Error(ErrorCode::kParse, "trace line " + std::to_string(line_no) + ": accepted must be 0/1");
    }
    row.accepted = f[6] == "1";
    row.mode = parse_acceptance_mode(f[7]);

    if (out.empty() || out.back().query_index != row.query_index) {
      if (row.attempt_ordinal != 1) {
        throw Error(ErrorCode::kSchema, "trace line " + std::to_string(line_no) + ": attempts must start at 1");
      }
      out.push_back({row.query_index, {}});
    } else if (row.attempt_ordinal != out.back().rows.size() + 1 ||
               row.mode != out.back().rows.front().mode) {
      throw Error(ErrorCode::kSchema, "trace line " + std::to_string(line_no) + ": inconsistent attempt row");
    }
    out.back().rows.push_back(std::move(row));
  }
  for (const auto& s : out) {
    const auto n = std::count_if(s.rows.begin(), s.rows.end(), [](const TraceRow& r) { return r.accepted; });
    if (n != 1) {
      throw Error(ErrorCode::kSchema,
                  "query " + std::to_string(s.query_index) + " must have exactly one accepted row");
    }
  }
  return out;
}

}  // namespace switchhit
