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

#include "switchhit/switchhit.h"

#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "switchhit/dataset.hpp"
#include "switchhit/error.hpp"
#include "switchhit/matchers.hpp"
#include "switchhit/pipeline.hpp"
#include "switchhit/stats.hpp"
#include "switchhit/switching.hpp"

struct sh_profile {
  switchhit::TechniqueProfile value;
};
struct sh_dataset {
  switchhit::DatasetManifest value;
};
struct sh_matcher {
  switchhit::MatcherIndex value;
};
struct sh_config {
  switchhit::RunConfig value;
};

namespace {

thread_local std::string g_last_error;

sh_status fail(sh_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <class F>
sh_status guarded(F&& body) {
  try {
    body();
    return SH_OK;
  } catch (const switchhit::Error& e) {
    return fail(static_cast<sh_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SH_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SH_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SH_ERR_INTERNAL, "unknown failure");
  }
}

#define SH_REQUIRE(cond, what) \
  if (!(cond)) return fail(SH_ERR_INVALID_ARGUMENT, what)

void emit(sh_write_fn sink, void* user, const std::string& text) {
  if (sink && !text.empty()) sink(text.data(), text.size(), user);
}

template <class F>
sh_status run_command(const sh_config* config, sh_write_fn sink, void* user, F&& command) {
  SH_REQUIRE(config, "null config");
  return guarded([&] {
    std::ostringstream out;
    command(config->value, out);
    emit(sink, user, out.str());
  });
}

}  // namespace

extern "C" {

const char* sh_version(void) { return "1.0.0"; }

const char* sh_status_category(sh_status status) {
  if (status == SH_OK) return "ok";
  if (status < SH_ERR_INVALID_ARGUMENT || status > SH_ERR_INTERNAL) return "internal_error";
  return switchhit::error_category(static_cast<switchhit::ErrorCode>(status));
}

const char* sh_last_error(void) { return g_last_error.c_str(); }

sh_status sh_bin_of(double score, size_t* bin) {
  SH_REQUIRE(bin, "null output");
  return guarded([&] { *bin = switchhit::bin_of(score); });
}

sh_status sh_profile_train(const char* technique, const double* scores, const int* correct,
                           size_t count, sh_profile** out) {
  SH_REQUIRE(technique && out, "null argument");
  SH_REQUIRE(count == 0 || (scores && correct), "null score or label array");
  return guarded([&] {
    std::vector<switchhit::ScoredOutcome> results;
    results.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      results.push_back({{0, scores[i]}, correct[i] != 0});
    }
    *out = new sh_profile{switchhit::train_profile(technique, results)};
  });
}

sh_status sh_profile_load(const char* path, sh_profile** out) {
  SH_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new sh_profile{switchhit::load_profile(path)}; });
}

sh_status sh_profile_save(const sh_profile* profile, const char* path) {
  SH_REQUIRE(profile && path, "null argument");
  return guarded([&] { switchhit::save_profile(profile->value, path); });
}

void sh_profile_free(sh_profile* profile) { delete profile; }

sh_status sh_profile_prior(const sh_profile* profile, double* pm, double* pmm) {
  SH_REQUIRE(profile && pm && pmm, "null argument");
  *pm = profile->value.prior_match;
  *pmm = profile->value.prior_mismatch;
  return SH_OK;
}

sh_status sh_profile_likelihood(const sh_profile* profile, size_t bin, double* pzm, double* pzmm) {
  SH_REQUIRE(profile && pzm && pzmm, "null argument");
  SH_REQUIRE(bin < SH_BIN_COUNT, "bin out of range");
  *pzm = profile->value.likelihood[bin].match;
  *pzmm = profile->value.likelihood[bin].mismatch;
  return SH_OK;
}

sh_status sh_profile_counts(const sh_profile* profile, size_t bin, size_t* matches,
                            size_t* mismatches) {
  SH_REQUIRE(profile && matches && mismatches, "null argument");
  SH_REQUIRE(bin < SH_BIN_COUNT, "bin out of range");
  *matches = profile->value.counts[bin].matches;
  *mismatches = profile->value.counts[bin].mismatches;
  return SH_OK;
}

sh_status sh_posterior(const sh_profile* profile, size_t bin, double* out) {
  SH_REQUIRE(profile && out, "null argument");
  SH_REQUIRE(bin < SH_BIN_COUNT, "bin out of range");
  *out = switchhit::posterior(profile->value, bin);
  return SH_OK;
}

sh_status sh_complementarity(const sh_profile* a, const sh_profile* b, size_t bin, double* out) {
  SH_REQUIRE(a && b && out, "null argument");
  SH_REQUIRE(bin < SH_BIN_COUNT, "bin out of range");
  *out = switchhit::complementarity(a->value, b->value, bin).value;
  return SH_OK;
}

sh_status sh_dataset_load(const char* manifest_path, sh_dataset** out) {
  SH_REQUIRE(manifest_path && out, "null argument");
  return guarded([&] { *out = new sh_dataset{switchhit::load_manifest(manifest_path)}; });
}

sh_status sh_dataset_generate(const sh_synthetic_spec* spec, sh_dataset** out) {
  SH_REQUIRE(spec && out, "null argument");
  SH_REQUIRE(spec->n_regimes == 0 || spec->regimes, "null regime array");
  return guarded([&] {
    std::vector<switchhit::FailureRegime> regimes;
    for (size_t i = 0; i < spec->n_regimes; ++i) {
      const sh_regime& r = spec->regimes[i];
      if (!r.perturbation) {
        throw switchhit::Error(switchhit::ErrorCode::kInvalidArgument, "regime without perturbation");
      }
      regimes.push_back({r.technique ? r.technique : "", r.begin, r.end,
                         {switchhit::parse_perturbation_kind(r.perturbation), r.amount, r.gain}});
    }
    switchhit::SyntheticOptions options;
    if (spec->image_size != 0) options.image_size = spec->image_size;
    if (spec->noise_sigma >= 0.0) options.noise_sigma = spec->noise_sigma;
    options.tolerance = spec->tolerance;
    *out = new sh_dataset{switchhit::generate_synthetic(spec->n_queries, spec->n_refs, regimes,
                                                        spec->seed, options)};
  });
}

sh_status sh_dataset_write(const sh_dataset* dataset, const char* dir) {
  SH_REQUIRE(dataset && dir, "null argument");
  return guarded([&] { switchhit::write_dataset(dataset->value, dir); });
}

size_t sh_dataset_query_count(const sh_dataset* dataset) {
  return dataset ? dataset->value.query_count() : 0;
}

size_t sh_dataset_reference_count(const sh_dataset* dataset) {
  return dataset ? dataset->value.reference_count() : 0;
}

sh_status sh_dataset_ground_truth(const sh_dataset* dataset, size_t query, size_t* gt) {
  SH_REQUIRE(dataset && gt, "null argument");
  SH_REQUIRE(query < dataset->value.query_count(), "query index out of range");
  *gt = dataset->value.queries[query].gt;
  return SH_OK;
}

void sh_dataset_free(sh_dataset* dataset) { delete dataset; }

sh_status sh_matcher_build(const sh_dataset* references, const char* variant, size_t param,
                           sh_matcher** out) {
  SH_REQUIRE(references && variant && out, "null argument");
  return guarded([&] {
    switchhit::MatcherConfig config;
    config.variant = switchhit::parse_matcher_variant(variant);
    if (param != 0) {
      if (config.variant == switchhit::MatcherVariant::kTinyImage) config.tiny_side = param;
      if (config.variant == switchhit::MatcherVariant::kHistogram) config.histogram_bins = param;
    }
    const auto refs = references->value.reference_images();
    *out = new sh_matcher{switchhit::MatcherIndex(config, refs)};
  });
}

sh_status sh_matcher_match_query(const sh_matcher* matcher, const sh_dataset* dataset,
                                 size_t query, size_t* reference_index, double* score) {
  SH_REQUIRE(matcher && dataset && reference_index && score, "null argument");
  SH_REQUIRE(query < dataset->value.query_count(), "query index out of range");
  return guarded([&] {
    const auto c = matcher->value.best_match(*dataset->value.queries[query].image);
    *reference_index = c.reference_index;
    *score = c.score;
  });
}

void sh_matcher_free(sh_matcher* matcher) { delete matcher; }

sh_status sh_config_load(const char* path, const sh_overrides* overrides, sh_config** out) {
  SH_REQUIRE(path && out, "null argument");
  return guarded([&] {
    switchhit::ConfigOverrides ov;
    if (overrides && overrides->has_threshold) ov.threshold = overrides->threshold;
    if (overrides && overrides->has_seed) ov.seed = overrides->seed;
    *out = new sh_config{switchhit::load_run_config(path, ov)};
  });
}

void sh_config_free(sh_config* config) { delete config; }

sh_status sh_train(const sh_config* config, sh_write_fn sink, void* user) {
  return run_command(config, sink, user,
                     [](const auto& c, std::ostream& out) { switchhit::cmd_train(c, out); });
}

sh_status sh_run(const sh_config* config, sh_write_fn sink, void* user) {
  return run_command(config, sink, user,
                     [](const auto& c, std::ostream& out) { switchhit::cmd_run(c, out); });
}

sh_status sh_eval(const sh_config* config, sh_write_fn sink, void* user) {
  return run_command(config, sink, user,
                     [](const auto& c, std::ostream& out) { switchhit::cmd_eval(c, out); });
}

sh_status sh_report(const sh_config* config, sh_write_fn sink, void* user) {
  return run_command(config, sink, user,
                     [](const auto& c, std::ostream& out) { switchhit::cmd_report(c, out); });
}

}  // extern "C"
