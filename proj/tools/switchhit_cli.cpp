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

// switchhit: train, run and evaluate technique combinations from one config.
// Every failure prints a single "<category>: <message>" line on stderr.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "switchhit/switchhit.h"

namespace {

int report_failure(sh_status status) {
  std::fprintf(stderr, "%s: %s\n", sh_status_category(status), sh_last_error());
  return static_cast<int>(status);
}

void to_stdout(const char* text, size_t length, void*) {
  std::fwrite(text, 1, length, stdout);
}

struct Regime {
  std::string technique;
  std::string kind;
  sh_regime raw{};
};

// technique:begin:end:kind:amount[:gain]
std::optional<Regime> parse_regime(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 5 && parts.size() != 6) return std::nullopt;
  try {
    Regime r;
    r.technique = parts[0];
    r.kind = parts[3];
    r.raw.begin = std::stoul(parts[1]);
    r.raw.end = std::stoul(parts[2]);
    r.raw.amount = std::stod(parts[4]);
    r.raw.gain = parts.size() == 6 ? std::stod(parts[5]) : 1.0;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SwitchHit: probabilistic complementarity-based technique switching"};
  app.require_subcommand(1);

  std::string config_path;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  const auto add_pipeline_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--threshold", threshold, "Override the posterior threshold");
    sub->add_option("--seed", seed, "Override the split seed");
  };

  auto* train = app.add_subcommand("train", "Train per-technique profiles on the train split");
  auto* run = app.add_subcommand("run", "Run the switching cascade over the test split");
  auto* eval = app.add_subcommand("eval", "Score traces and write report artifacts");
  auto* report = app.add_subcommand("report", "Print a summary table of the last evaluation");
  for (auto* sub : {train, run, eval, report}) add_pipeline_flags(sub);

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset and manifest");
  std::string out_dir;
  std::size_t n_queries = 100, n_refs = 50, image_size = 64, tolerance = 0;
  double noise = 0.01;
  std::uint64_t gen_seed = 0;
  std::vector<std::string> regime_specs;
  generate->add_option("--out", out_dir, "Output directory")->required();
  generate->add_option("--queries", n_queries, "Number of queries");
  generate->add_option("--refs", n_refs, "Number of references");
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--image-size", image_size, "Side of the square images");
  generate->add_option("--noise", noise, "Query noise sigma");
  generate->add_option("--tolerance", tolerance, "Ground-truth tolerance window");
  generate->add_option("--regime", regime_specs,
                       "Failure regime technique:begin:end:kind:amount[:gain]; kind is one of "
                       "blur, brightness, occlusion, shift");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage_error: %s\n", e.what());
    return 64;
  }

  if (generate->parsed()) {
    std::vector<Regime> regimes;
    for (const auto& spec : regime_specs) {
      auto r = parse_regime(spec);
      if (!r) {
        std::fprintf(stderr, "usage_error: bad --regime '%s'\n", spec.c_str());
        return 64;
      }
      regimes.push_back(std::move(*r));
    }
    std::vector<sh_regime> raw;
    for (auto& r : regimes) {
      r.raw.technique = r.technique.c_str();
      r.raw.perturbation = r.kind.c_str();
      raw.push_back(r.raw);
    }
    const sh_synthetic_spec spec{n_queries, n_refs, gen_seed, raw.data(), raw.size(),
                                 image_size, noise, tolerance};
    sh_dataset* dataset = nullptr;
    sh_status status = sh_dataset_generate(&spec, &dataset);
    if (status == SH_OK) status = sh_dataset_write(dataset, out_dir.c_str());
    sh_dataset_free(dataset);
    if (status != SH_OK) return report_failure(status);
    std::printf("wrote %zu queries and %zu references to %s\n", n_queries, n_refs, out_dir.c_str());
    return 0;
  }

  CLI::App* active = app.get_subcommands().front();
  sh_overrides overrides{};
  if (active->count("--threshold") > 0) {
    overrides.has_threshold = 1;
    overrides.threshold = threshold;
  }
  if (active->count("--seed") > 0) {
    overrides.has_seed = 1;
    overrides.seed = seed;
  }

  sh_config* config = nullptr;
  sh_status status = sh_config_load(config_path.c_str(), &overrides, &config);
  if (status != SH_OK) return report_failure(status);

  if (active == train) {
    status = sh_train(config, to_stdout, nullptr);
  } else if (active == run) {
    status = sh_run(config, to_stdout, nullptr);
  } else if (active == eval) {
    status = sh_eval(config, to_stdout, nullptr);
  } else {
    status = sh_report(config, to_stdout, nullptr);
  }
  sh_config_free(config);
  return status == SH_OK ? 0 : report_failure(status);
}
