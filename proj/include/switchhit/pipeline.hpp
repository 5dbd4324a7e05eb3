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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "switchhit/dataset.hpp"
#include "switchhit/eval.hpp"
#include "switchhit/matchers.hpp"
#include "switchhit/stats.hpp"
#include "switchhit/switching.hpp"

namespace switchhit {

struct TechniqueSpec {
  std::string name;
  MatcherConfig matcher;
};

/// One experiment cell: dataset, technique combination, split and outputs.
struct RunConfig {
  std::filesystem::path manifest;
  std::vector<TechniqueSpec> combination;
  double threshold = 0.5;
  SplitSpec split;
  std::optional<std::size_t> tolerance;  // overrides the manifest's window
  std::filesystem::path out_dir;

  SwitchConfig switch_config() const;
  std::vector<std::string> technique_names() const;
  std::filesystem::path profile_path(const std::string& technique) const;
  std::filesystem::path trace_path() const;
};

struct ConfigOverrides {
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
};

/// Relative paths resolve against the config file's directory. Throws
/// Error(kConfig) for any structural problem, before any dataset work.
RunConfig parse_run_config(const std::string& json_text,
                           const std::filesystem::path& base_dir,
                           const ConfigOverrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          const ConfigOverrides& overrides = {});

/// Dataset, split and per-technique indices prepared from a config.
struct PreparedRun {
  DatasetManifest train;
  DatasetManifest test;
  TechniqueMap techniques;
};
PreparedRun prepare_run(const RunConfig& config);

/// Trains one profile per technique on the train split and writes them under
/// <out_dir>/profiles. Prints a per-technique summary to `log`.
std::vector<TechniqueProfile> cmd_train(const RunConfig& config, std::ostream& log);

/// Runs the cascade over the test split and writes <out_dir>/traces.csv.
std::vector<SwitchTrace> cmd_run(const RunConfig& config, std::ostream& log);

/// Scores traces.csv against ground truth and writes the report artifacts.
EvalReport cmd_eval(const RunConfig& config, std::ostream& log);

/// Prints a table summarizing <out_dir>/report.json.
void cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace switchhit
