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

#include "switchhit/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "switchhit/error.hpp"
#include "util.hpp"

namespace switchhit {

namespace fs = std::filesystem;
using nlohmann::json;

SwitchConfig RunConfig::switch_config() const {
  SwitchConfig sc;
  sc.combination = technique_names();
  sc.threshold = threshold;
  return sc;
}

std::vector<std::string> RunConfig::technique_names() const {
  std::vector<std::string> names;
  for (const auto& t : combination) names.push_back(t.name);
  return names;
}

fs::path RunConfig::profile_path(const std::string& technique) const {
  return out_dir / "profiles" / (technique + ".json");
}

fs::path RunConfig::trace_path() const { return out_dir / "traces.csv"; }

namespace {

Error config_error(const std::string& what) { return Error(ErrorCode::kConfig, what); }

bool valid_technique_name(const std::string& name) {
  return !name.empty() && name != "switchhit" &&
         std::all_of(name.begin(), name.end(), [](unsigned char c) {
           return std::isalnum(c) || c == '_' || c == '-' || c == '.';
         });
}

std::size_t positive_param(const json& params, const char* key, std::size_t fallback) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw config_error(std::string("parameter '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

TechniqueSpec parse_technique(const json& entry) {
  if (!entry.is_object()) throw config_error("combination entries must be objects");
  if (!entry.contains("name") || !entry.at("name").is_string()) {
    throw config_error("combination entry without a name");
  }
  TechniqueSpec spec;
  spec.name = entry.at("name").get<std::string>();
  if (!valid_technique_name(spec.name)) {
    throw config_error("invalid technique name '" + spec.name +
                       "' (use letters, digits, '_', '-', '.'; 'switchhit' is reserved)");
  }
  if (!entry.contains("variant") || !entry.at("variant").is_string()) {
    throw config_error("technique '" + spec.name + "' has no matcher variant");
  }
  spec.matcher.variant = parse_matcher_variant(entry.at("variant").get<std::string>());

  const json params = entry.value("params", json::object());
  if (!params.is_object()) throw config_error("params of '" + spec.name + "' must be an object");
  std::set<std::string> allowed;
  switch (spec.matcher.variant) {
    case MatcherVariant::kTinyImage:
      spec.matcher.tiny_side = positive_param(params, "side", spec.matcher.tiny_side);
      allowed = {"side"};
      break;
    case MatcherVariant::kHistogram:
      spec.matcher.histogram_bins = positive_param(params, "bins", spec.matcher.histogram_bins);
      allowed = {"bins"};
      break;
    case MatcherVariant::kHog:
      break;
  }
  for (const auto& [key, value] : params.items()) {
    if (!allowed.contains(key)) {
      throw config_error("unknown parameter '" + key + "' for technique '" + spec.name + "'");
    }
  }
  spec.matcher.validate();
  return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const fs::path& base_dir,
                           const ConfigOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config must be a JSON object");

  RunConfig cfg;
  try {
    if (!doc.contains("manifest")) throw config_error("config has no manifest");
    cfg.manifest = base_dir / doc.at("manifest").get<std::string>();
    if (!doc.contains("out_dir")) throw config_error("config has no out_dir");
    cfg.out_dir = base_dir / doc.at("out_dir").get<std::string>();

    const auto& combo = doc.at("combination");
    if (!combo.is_array() || combo.empty()) throw config_error("combination must be a non-empty array");
    std::set<std::string> seen;
    for (const auto& entry : combo) {
      cfg.combination.push_back(parse_technique(entry));
      if (!seen.insert(cfg.combination.back().name).second) {
        throw config_error("duplicate technique name '" + cfg.combination.back().name + "'");
      }
    }

    cfg.threshold = doc.value("threshold", 0.5);
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      cfg.split.train_fraction = s.value("train_fraction", 0.5);
      cfg.split.seed = s.value("seed", std::uint64_t{0});
    }
    if (doc.contains("tolerance")) {
      const auto t = doc.at("tolerance").get<long long>();
      if (t < 0) throw config_error("tolerance must be >= 0");
      cfg.tolerance = static_cast<std::size_t>(t);
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("bad config field: ") + e.what());
  }

  if (overrides.threshold) cfg.threshold = *overrides.threshold;
  if (overrides.seed) cfg.split.seed = *overrides.seed;

  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw config_error("threshold must lie in [0,1]");
  }
  if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0)) {
    throw config_error("split.train_fraction must lie in (0,1)");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const ConfigOverrides& overrides) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "config not found: " + path.string());
  return parse_run_config(detail::read_text_file(path), path.parent_path(), overrides);
}

PreparedRun prepare_run(const RunConfig& config) {
  DatasetManifest manifest = load_manifest(config.manifest);
  if (config.tolerance) manifest.tolerance = *config.tolerance;
  auto [train, test] = split(manifest, config.split);
  PreparedRun run{std::move(train), std::move(test), {}};
  const auto refs = manifest.reference_images();
  for (const auto& t : config.combination) {
    run.techniques[t.name] = std::make_shared<const MatcherIndex>(t.matcher, refs);
  }
  return run;
}

std::vector<TechniqueProfile> cmd_train(const RunConfig& config, std::ostream& log) {
  const PreparedRun run = prepare_run(config);
  const TechniqueResults results = run_all(run.train, config.technique_names(), run.techniques);
  std::vector<TechniqueProfile> profiles;
  for (const auto& t : config.combination) {
    const auto& candidates = results.at(t.name);
    std::vector<ScoredOutcome> outcomes;
    outcomes.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      outcomes.push_back({candidates[i], is_correct(candidates[i], run.train.queries[i].gt,
                                                    run.train.tolerance)});
    }
    TechniqueProfile profile = train_profile(t.name, outcomes);
    save_profile(profile, config.profile_path(t.name));

    log << t.name << " (" << matcher_variant_name(t.matcher.variant)
        << "): trained on " << profile.training_size << " queries, P(M)="
        << detail::format_double(profile.prior_match) << '\n';
    log << "  bin  ";
    for (std::size_t b = 0; b < kBinCount; ++b) log << ' ' << b;
    log << "\n  W    ";
    for (const auto& c : profile.counts) log << ' ' << c.matches;
    log << "\n  Y    ";
    for (const auto& c : profile.counts) log << ' ' << c.mismatches;
    log << '\n';
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

namespace {

ProfileMap load_profiles(const RunConfig& config) {
  ProfileMap profiles;
  for (const auto& t : config.combination) {
    const fs::path path = config.profile_path(t.name);
    if (!fs::exists(path)) {
      throw Error(ErrorCode::kIo, "missing profile for technique '" + t.name + "': " + path.string());
    }
    TechniqueProfile p = load_profile(path);
    if (p.technique != t.name) {
      throw Error(ErrorCode::kSchema, "profile " + path.string() + " belongs to '" + p.technique +
                                          "', expected '" + t.name + "'");
    }
    profiles.emplace(t.name, std::move(p));
  }
  return profiles;
}

}  // namespace

std::vector<SwitchTrace> cmd_run(const RunConfig& config, std::ostream& log) {
  const ProfileMap profiles = load_profiles(config);
  const PreparedRun run = prepare_run(config);
  const auto traces = run_dataset(run.test, config.switch_config(), profiles, run.techniques);

  std::ostringstream csv;
  write_trace_csv(csv, traces);
  detail::write_text_file(config.trace_path(), csv.str());

  const auto switched = std::count_if(traces.begin(), traces.end(),
                                      [](const SwitchTrace& t) { return t.attempts.size() > 1; });
  log << "ran " << traces.size() << " test queries at threshold "
      << detail::format_double(config.threshold) << ", " << switched
      << " switched; traces written to " << config.trace_path().string() << '\n';
  return traces;
}

EvalReport cmd_eval(const RunConfig& config, std::ostream& log) {
  const fs::path trace_file = config.trace_path();
  std::ifstream in(trace_file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open traces " + trace_file.string());
  const auto summaries = read_trace_csv(in);

  const PreparedRun run = prepare_run(config);
  const auto names = config.technique_names();
  const TechniqueResults results = run_all(run.test, names, run.techniques);
  const auto traces = reconstruct_traces(summaries, results, run.test.query_count());
  EvalReport report = build_report(traces, names, results, run.test, config.threshold);
  write_report(report, config.out_dir);

  log << "switchhit " << report.switchhit.correct << '/' << report.n_queries;
  for (const auto& t : report.techniques) log << ", " << t.name << ' ' << t.correct;
  log << "; report written to " << (config.out_dir / "report.json").string() << '\n';
  return report;
}

void cmd_report(const RunConfig& config, std::ostream& out) {
  const fs::path path = config.out_dir / "report.json";
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no report at " + path.string() + " (run eval first)");
  json doc;
  try {
    doc = json::parse(detail::read_text_file(path));
    const auto n = doc.at("n_queries").get<std::size_t>();
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s %12s %10s\n", "technique", "correct", "auc");
    out << line;
    const auto row = [&](const std::string& name, std::size_t correct, double area) {
      const std::string frac = std::to_string(correct) + "/" + std::to_string(n);
      std::snprintf(line, sizeof(line), "%-20s %12s %10.4f\n", name.c_str(), frac.c_str(), area);
      out << line;
    };
    for (const auto& t : doc.at("techniques")) {
      row(t.at("name").get<std::string>(), t.at("correct").get<std::size_t>(),
          t.at("auc").get<double>());
    }
    row("switchhit", doc.at("switchhit_correct").get<std::size_t>(),
        doc.at("switchhit_auc").get<double>());
    out << "threshold " << doc.at("threshold").get<double>() << "; attempts per query:";
    for (const auto& [k, v] : doc.at("attempts_histogram").items()) {
      out << ' ' << k << "->" << v.get<std::size_t>();
    }
    out << "\naccepted by:";
    for (const auto& [k, v] : doc.at("accepted_by").items()) {
      out << ' ' << k << '=' << v.get<std::size_t>();
    }
    out << '\n';
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, "bad report " + path.string() + ": " + e.what());
  }
}

}  // namespace switchhit
