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

/* C interface to the SwitchHit library.
 *
 * Every object is an opaque handle created by a *_load / *_train / *_build
 * function and released with the matching *_free. Functions return an
 * sh_status; on failure sh_last_error() holds a one-line message for the
 * calling thread until its next failing call. */

#ifndef SWITCHHIT_SWITCHHIT_H_
#define SWITCHHIT_SWITCHHIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define SH_API __declspec(dllexport)
#else
#  define SH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sh_status {
  SH_OK = 0,
  SH_ERR_INVALID_ARGUMENT = 1,
  SH_ERR_IO = 2,
  SH_ERR_PARSE = 3,
  SH_ERR_SCHEMA = 4,
  SH_ERR_DATASET = 5,
  SH_ERR_CONFIG = 6,
  SH_ERR_INTERNAL = 7
} sh_status;

#define SH_BIN_COUNT 10

SH_API const char* sh_version(void);
/* "config_error", "io_error", ... ; "ok" for SH_OK. */
SH_API const char* sh_status_category(sh_status status);
SH_API const char* sh_last_error(void);

/* Receives text produced by the pipeline commands. */
typedef void (*sh_write_fn)(const char* text, size_t length, void* user);

/* ---- scoring primitives ------------------------------------------------ */

typedef struct sh_profile sh_profile;

SH_API sh_status sh_bin_of(double score, size_t* bin);

/* scores[i] in [0,1], correct[i] nonzero for a correct match. */
SH_API sh_status sh_profile_train(const char* technique, const double* scores,
                                  const int* correct, size_t count,
                                  sh_profile** out);
SH_API sh_status sh_profile_load(const char* path, sh_profile** out);
SH_API sh_status sh_profile_save(const sh_profile* profile, const char* path);
SH_API void sh_profile_free(sh_profile* profile);

SH_API sh_status sh_profile_prior(const sh_profile* profile, double* pm, double* pmm);
SH_API sh_status sh_profile_likelihood(const sh_profile* profile, size_t bin,
                                       double* pzm, double* pzmm);
SH_API sh_status sh_profile_counts(const sh_profile* profile, size_t bin,
                                   size_t* matches, size_t* mismatches);
SH_API sh_status sh_posterior(const sh_profile* profile, size_t bin, double* out);
SH_API sh_status sh_complementarity(const sh_profile* a, const sh_profile* b,
                                    size_t bin, double* out);

/* ---- datasets ---------------------------------------------------------- */

typedef struct sh_dataset sh_dataset;

typedef struct sh_regime {
  const char* technique;    /* informational label */
  size_t begin;             /* first perturbed query */
  size_t end;               /* one past the last */
  const char* perturbation; /* "blur", "brightness", "occlusion", "shift" */
  double amount;
  double gain;              /* brightness only; use 1.0 otherwise */
} sh_regime;

typedef struct sh_synthetic_spec {
  size_t n_queries;
  size_t n_refs;
  uint64_t seed;
  const sh_regime* regimes;
  size_t n_regimes;
  size_t image_size;   /* 0 selects the default (64) */
  double noise_sigma;  /* negative selects the default (0.01) */
  size_t tolerance;
} sh_synthetic_spec;

SH_API sh_status sh_dataset_load(const char* manifest_path, sh_dataset** out);
SH_API sh_status sh_dataset_generate(const sh_synthetic_spec* spec, sh_dataset** out);
/* Writes images plus manifest.json into dir. */
SH_API sh_status sh_dataset_write(const sh_dataset* dataset, const char* dir);
SH_API size_t sh_dataset_query_count(const sh_dataset* dataset);
SH_API size_t sh_dataset_reference_count(const sh_dataset* dataset);
SH_API sh_status sh_dataset_ground_truth(const sh_dataset* dataset, size_t query,
                                         size_t* gt);
SH_API void sh_dataset_free(sh_dataset* dataset);

/* ---- matchers ---------------------------------------------------------- */

typedef struct sh_matcher sh_matcher;

/* variant: "tiny-image", "hog" or "histogram"; param is the tiny-image side
 * or the histogram bin count (0 selects the default, ignored for hog). */
SH_API sh_status sh_matcher_build(const sh_dataset* references, const char* variant,
                                  size_t param, sh_matcher** out);
SH_API sh_status sh_matcher_match_query(const sh_matcher* matcher,
                                        const sh_dataset* dataset, size_t query,
                                        size_t* reference_index, double* score);
SH_API void sh_matcher_free(sh_matcher* matcher);

/* ---- pipeline ---------------------------------------------------------- */

typedef struct sh_config sh_config;

typedef struct sh_overrides {
  int has_threshold;
  double threshold;
  int has_seed;
  uint64_t seed;
} sh_overrides;

/* overrides may be NULL. */
SH_API sh_status sh_config_load(const char* path, const sh_overrides* overrides,
                                sh_config** out);
SH_API void sh_config_free(sh_config* config);

/* sink may be NULL to discard output. */
SH_API sh_status sh_train(const sh_config* config, sh_write_fn sink, void* user);
SH_API sh_status sh_run(const sh_config* config, sh_write_fn sink, void* user);
SH_API sh_status sh_eval(const sh_config* config, sh_write_fn sink, void* user);
SH_API sh_status sh_report(const sh_config* config, sh_write_fn sink, void* user);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* SWITCHHIT_SWITCHHIT_H_ */
