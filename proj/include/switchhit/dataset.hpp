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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "switchhit/image.hpp"

namespace switchhit {

using ImagePtr = std::shared_ptr<const GrayImage>;

struct QueryEntry {
  std::string locator;  // path relative to the manifest directory
  std::size_t gt = 0;   // ground-truth reference index
  ImagePtr image;
};

struct ReferenceEntry {
  std::string locator;
  ImagePtr image;
};

/// Queries with ground truth, a shared reference map, and the frame window
/// within which a retrieved reference counts as correct. Images are decoded
/// eagerly and shared immutably between copies and splits.
struct DatasetManifest {
  std::vector<QueryEntry> queries;
  std::vector<ReferenceEntry> references;
  std::size_t tolerance = 0;

  std::size_t query_count() const noexcept { return queries.size(); }
  std::size_t reference_count() const noexcept { return references.size(); }
  std::vector<ImagePtr> reference_images() const;

  /// Throws Error(kDataset) on an empty side or an out-of-range gt.
  void validate() const;
};

/// Parses a JSON manifest ({references, queries: [{image, gt}], tolerance})
/// and decodes every image it names. Locators resolve against the manifest's
/// directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes every image as 16-bit PGM under `dir` using the entries' locators
/// and a manifest.json next to them. Returns the manifest path.
std::filesystem::path write_dataset(const DatasetManifest& manifest,
                                    const std::filesystem::path& dir);

struct SplitSpec {
  double train_fraction = 0.5;
  std::uint64_t seed = 0;
};

/// Seeded partition of the queries into (train, test). The train side gets
/// round(train_fraction * n) queries, clamped to [1, n-1]. Both sides keep
/// the original relative query order and share the reference set.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  const SplitSpec& spec);

enum class PerturbationKind { kNone, kBlur, kBrightness, kOcclusion, kShift };

/// kBlur: Gaussian sigma = amount pixels.
/// kBrightness: p' = clamp(gain * p + amount).
/// kOcclusion: square occluder covering amount * side per axis, random
///   position and fill value.
/// kShift: circular translation by amount * width (x) and amount * height (y).
struct Perturbation {
  PerturbationKind kind = PerturbationKind::kNone;
  double amount = 0.0;
  double gain = 1.0;
};

PerturbationKind parse_perturbation_kind(const std::string& name);
const char* perturbation_name(PerturbationKind kind) noexcept;

/// Queries [begin, end) receive `perturbation`. `technique` names the matcher
/// the regime is meant to hurt; it is informational only.
struct FailureRegime {
  std::string technique;
  std::size_t begin = 0;
  std::size_t end = 0;
  Perturbation perturbation;
};

struct SyntheticOptions {
  std::size_t image_size = 64;
  double noise_sigma = 0.01;  // additive Gaussian noise on every query
  std::size_t tolerance = 0;
};

/// Procedural place dataset: each reference is a random mix of gratings and
/// blobs rescaled to a random intensity range; each query is a noisy copy of
/// its ground-truth reference, perturbed when it falls in a regime.
/// Deterministic for a fixed seed.
DatasetManifest generate_synthetic(std::size_t n_queries, std::size_t n_refs,
                                   const std::vector<FailureRegime>& regimes,
                                   std::uint64_t seed,
                                   const SyntheticOptions& options = {});

/// Applies one perturbation. `seed` drives the random parts (occluder
/// placement and fill).
GrayImage perturb(const GrayImage& image, const Perturbation& perturbation,
                  std::uint64_t seed);

}  // namespace switchhit
