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

// Fixtures shared by the unit and acceptance suites.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "switchhit/dataset.hpp"
#include "switchhit/eval.hpp"
#include "switchhit/matchers.hpp"
#include "switchhit/stats.hpp"
#include "switchhit/switching.hpp"

namespace switchhit::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("switchhit_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline MatcherConfig tiny_config() { return {MatcherVariant::kTinyImage, 8, 32}; }
inline MatcherConfig hog_config() { return {MatcherVariant::kHog, 8, 32}; }
inline MatcherConfig histogram_config() { return {MatcherVariant::kHistogram, 8, 32}; }

/// Regime that flattens contrast into the upper intensity range: global
/// histograms stop matching while spatial structure survives.
inline Perturbation brightness_compression() { return {PerturbationKind::kBrightness, 0.6, 0.35}; }
/// Circular half-image shift: histograms are untouched, layouts are not.
inline Perturbation half_shift() { return {PerturbationKind::kShift, 0.5, 1.0}; }

/// 200 queries: [0,80) hurt the histogram matcher, [80,160) hurt the
/// tiny-image matcher, the rest are clean.
inline DatasetManifest complementary_dataset(std::uint64_t seed = 11, std::size_t n_queries = 200) {
  const std::size_t a = n_queries * 2 / 5, b = n_queries * 4 / 5;
  return generate_synthetic(n_queries, 50,
                            {{"histogram", 0, a, brightness_compression()},
                             {"tiny", a, b, half_shift()}},
                            seed);
}

/// Indices for (name, config) pairs over the manifest's references.
inline TechniqueMap build_techniques(const DatasetManifest& manifest,
                                     const std::vector<std::pair<std::string, MatcherConfig>>& specs) {
  TechniqueMap out;
  const auto refs = manifest.reference_images();
  for (const auto& [name, config] : specs) {
    out[name] = std::make_shared<const MatcherIndex>(config, refs);
  }
  return out;
}

/// Trains one profile per technique on `train`.
inline ProfileMap train_profiles(const DatasetManifest& train, const TechniqueMap& techniques) {
  ProfileMap out;
  for (const auto& [name, technique] : techniques) {
    std::vector<ScoredOutcome> outcomes;
    for (const auto& q : train.queries) {
      const auto c = technique->best_match(*q.image);
      outcomes.push_back({c, is_correct(c, q.gt, train.tolerance)});
    }
    out.emplace(name, train_profile(name, outcomes));
  }
  return out;
}

inline std::size_t count_correct(const std::vector<MatchCandidate>& results,
                                 const DatasetManifest& manifest) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    n += is_correct(results[i], manifest.queries[i].gt, manifest.tolerance) ? 1 : 0;
  }
  return n;
}

inline std::size_t count_correct(const std::vector<SwitchTrace>& traces,
                                 const DatasetManifest& manifest) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    n += is_correct(traces[i].accepted_candidate(), manifest.queries[i].gt, manifest.tolerance) ? 1 : 0;
  }
  return n;
}

/// Writes a synthetic dataset plus a run config next to it; returns the
/// config path.
inline std::filesystem::path write_run_fixture(const TempDir& dir, const DatasetManifest& manifest,
                                               const std::string& combination_json,
                                               double threshold = 0.5, std::uint64_t seed = 7) {
  write_dataset(manifest, dir / "data");
  std::ostringstream cfg;
  cfg << "{\n  \"manifest\": \"data/manifest.json\",\n"
      << "  \"combination\": " << combination_json << ",\n"
      << "  \"threshold\": " << threshold << ",\n"
      << "  \"split\": {\"train_fraction\": 0.5, \"seed\": " << seed << "},\n"
      << "  \"out_dir\": \"out\"\n}\n";
  const auto path = dir / "config.json";
  spit(path, cfg.str());
  return path;
}

inline const char* kThreeTechniques =
    R"([{"name": "tiny", "variant": "tiny-image", "params": {"side": 8}},
        {"name": "hog", "variant": "hog"},
        {"name": "hist", "variant": "histogram", "params": {"bins": 32}}])";

inline const char* kTwoTechniques =
    R"([{"name": "tiny", "variant": "tiny-image"},
        {"name": "hist", "variant": "histogram"}])";

}  // namespace switchhit::testing
