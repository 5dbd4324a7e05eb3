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

#include "switchhit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "switchhit/error.hpp"
#include "util.hpp"

namespace switchhit {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<ImagePtr> DatasetManifest::reference_images() const {
  std::vector<ImagePtr> out;
  out.reserve(references.size());
  for (const auto& r : references) out.push_back(r.image);
  return out;
}

void DatasetManifest::validate() const {
  if (queries.empty() || references.empty()) {
    throw Error(ErrorCode::kDataset, "empty dataset");
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].gt >= references.size()) {
      throw Error(ErrorCode::kDataset,
                  "ground-truth index out of range (query " + std::to_string(i) + ", gt " +
                      std::to_string(queries[i].gt) + ", " +
                      std::to_string(references.size()) + " references)");
    }
  }
}

DatasetManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "manifest not found: " + path.string());
  json doc;
  try {
    doc = json::parse(detail::read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed manifest " + path.string() + ": " + e.what());
  }

  DatasetManifest manifest;
  try {
    for (const auto& r : doc.at("references")) {
      manifest.references.push_back({r.get<std::string>(), nullptr});
    }
    for (const auto& q : doc.at("queries")) {
      const auto gt = q.at("gt").get<long long>();
      if (gt < 0) throw Error(ErrorCode::kDataset, "ground-truth index out of range");
      manifest.queries.push_back(
          {q.at("image").get<std::string>(), static_cast<std::size_t>(gt), nullptr});
    }
    const auto tolerance = doc.value("tolerance", 0LL);
    if (tolerance < 0) throw Error(ErrorCode::kParse, "malformed manifest: negative tolerance");
    manifest.tolerance = static_cast<std::size_t>(tolerance);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed manifest " + path.string() + ": " + e.what());
  }
  manifest.validate();

  const fs::path base = path.parent_path();
  for (auto& r : manifest.references) {
    r.image = std::make_shared<const GrayImage>(read_image(base / r.locator));
  }
  for (auto& q : manifest.queries) {
    q.image = std::make_shared<const GrayImage>(read_image(base / q.locator));
  }
  return manifest;
}

fs::path write_dataset(const DatasetManifest& manifest, const fs::path& dir) {
  manifest.validate();
  json doc;
  doc["references"] = json::array();
  for (const auto& r : manifest.references) {
    write_pgm(*r.image, dir / r.locator);
    doc["references"].push_back(r.locator);
  }
  doc["queries"] = json::array();
  for (const auto& q : manifest.queries) {
    write_pgm(*q.image, dir / q.locator);
    doc["queries"].push_back({{"image", q.locator}, {"gt", q.gt}});
  }
  doc["tolerance"] = manifest.tolerance;
  const fs::path out = dir / "manifest.json";
  detail::write_text_file(out, doc.dump(2) + "\n");
  return out;
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  const SplitSpec& spec) {
  const std::size_t n = manifest.queries.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "split needs at least 2 queries");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train_fraction must lie in (0,1)");
  }
  const auto wanted = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
  const std::size_t n_train = std::clamp<std::size_t>(wanted, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  detail::Rng rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test_idx(order.begin() + n_train, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  const auto take = [&](const std::vector<std::size_t>& idx) {
    DatasetManifest part;
    part.references = manifest.references;
    part.tolerance = manifest.tolerance;
    for (std::size_t i : idx) part.queries.push_back(manifest.queries[i]);
    return part;
  };
  return {take(train_idx), take(test_idx)};
}

PerturbationKind parse_perturbation_kind(const std::string& name) {
  if (name == "none") return PerturbationKind::kNone;
  if (name == "blur") return PerturbationKind::kBlur;
  if (name == "brightness") return PerturbationKind::kBrightness;
  if (name == "occlusion") return PerturbationKind::kOcclusion;
  if (name == "shift") return PerturbationKind::kShift;
  throw Error(ErrorCode::kInvalidArgument, "unknown perturbation: " + name);
}

const char* perturbation_name(PerturbationKind kind) noexcept {
  switch (kind) {
    case PerturbationKind::kNone: return "none";
    case PerturbationKind::kBlur: return "blur";
    case PerturbationKind::kBrightness: return "brightness";
    case PerturbationKind::kOcclusion: return "occlusion";
    case PerturbationKind::kShift: return "shift";
  }
  return "none";
}

namespace {

std::vector<double> gaussian_blur(const GrayImage& image, double sigma) {
  const std::size_t w = image.width(), h = image.height();
  std::vector<double> src(image.pixels().begin(), image.pixels().end());
  if (sigma <= 0.0) return src;
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (long k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
  }
  const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& k : kernel) k /= norm;

  const auto clamp_idx = [](long v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(v, 0, static_cast<long>(n) - 1));
  };
  std::vector<double> tmp(src.size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * src[y * w + clamp_idx(static_cast<long>(x) + k, w)];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp[clamp_idx(static_cast<long>(y) + k, h) * w + x];
      }
      src[y * w + x] = std::clamp(acc, 0.0, 1.0);
    }
  }
  return src;
}

GrayImage make_reference(std::size_t size, detail::Rng& rng) {
  const double s = static_cast<double>(size);
  struct Grating { double fx, fy, phase, amp; };
  struct Blob { double cx, cy, radius, amp; };
  std::vector<Grating> gratings(3);
  for (auto& g : gratings) {
    const double freq = rng.uniform(1.0, 4.0);
    const double angle = rng.uniform(0.0, M_PI);
    g = {freq * std::cos(angle), freq * std::sin(angle), rng.uniform(0.0, 2 * M_PI),
         rng.uniform(0.3, 1.0)};
  }
  std::vector<Blob> blobs(3);
  for (auto& b : blobs) {
    b = {rng.uniform(0.0, s), rng.uniform(0.0, s), rng.uniform(s / 10, s / 4),
         rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0)};
  }
  std::vector<double> v(size * size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      double acc = 0.0;
      for (const auto& g : gratings) {
        acc += g.amp * std::sin(2 * M_PI * (g.fx * x + g.fy * y) / s + g.phase);
      }
      for (const auto& b : blobs) {
        const double dx = x - b.cx, dy = y - b.cy;
        acc += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.radius * b.radius));
      }
      v[y * size + x] = acc;
    }
  }
  // Random intensity range and gamma so global histograms differ per place.
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double lo = *mn, span = std::max(*mx - *mn, 1e-12);
  const double out_lo = rng.uniform(0.0, 0.35);
  const double out_hi = rng.uniform(0.65, 1.0);
  const double gamma = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
  for (double& p : v) {
    const double t = std::pow((p - lo) / span, gamma);
    p = std::clamp(out_lo + (out_hi - out_lo) * t, 0.0, 1.0);
  }
  return GrayImage(size, size, std::move(v));
}

}  // namespace

GrayImage perturb(const GrayImage& image, const Perturbation& perturbation,
                  std::uint64_t seed) {
  const std::size_t w = image.width(), h = image.height();
  std::vector<double> px(image.pixels().begin(), image.pixels().end());
  switch (perturbation.kind) {
    case PerturbationKind::kNone:
      break;
    case PerturbationKind::kBlur:
      px = gaussian_blur(image, perturbation.amount);
      break;
    case PerturbationKind::kBrightness:
      for (double& p : px) p = std::clamp(perturbation.gain * p + perturbation.amount, 0.0, 1.0);
      break;
    case PerturbationKind::kOcclusion: {
      detail::Rng rng(seed);
      const double frac = std::clamp(perturbation.amount, 0.0, 1.0);
      const auto ow = static_cast<std::size_t>(std::lround(frac * w));
      const auto oh = static_cast<std::size_t>(std::lround(frac * h));
      const std::size_t x0 = rng.below(w - ow + 1);
      const std::size_t y0 = rng.below(h - oh + 1);
      const double fill = rng.uniform();
      for (std::size_t y = y0; y < y0 + oh; ++y) {
        for (std::size_t x = x0; x < x0 + ow; ++x) px[y * w + x] = fill;
      }
      break;
    }
    case PerturbationKind::kShift: {
      const auto dx = static_cast<std::size_t>(std::lround(perturbation.amount * w)) % w;
      const auto dy = static_cast<std::size_t>(std::lround(perturbation.amount * h)) % h;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          px[((y + dy) % h) * w + (x + dx) % w] = image.at(x, y);
        }
      }
      break;
    }
  }
  return GrayImage(w, h, std::move(px));
}

DatasetManifest generate_synthetic(std::size_t n_queries, std::size_t n_refs,
                                   const std::vector<FailureRegime>& regimes,
                                   std::uint64_t seed, const SyntheticOptions& options) {
  if (n_queries < 2 || n_refs < 2) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic dataset needs >= 2 queries and references");
  }
  if (options.image_size < 8) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic image size must be >= 8");
  }
  for (const auto& r : regimes) {
    if (r.begin > r.end || r.end > n_queries) {
      throw Error(ErrorCode::kInvalidArgument, "regime query range out of bounds");
    }
  }

  // Stream ids: [0, n_refs) references, 1<<32 ground truth, (1<<33)+i queries.
  constexpr std::uint64_t kGtStream = 1ULL << 32;
  constexpr std::uint64_t kQueryStream = 1ULL << 33;

  DatasetManifest manifest;
  manifest.tolerance = options.tolerance;
  char name[64];
  for (std::size_t r = 0; r < n_refs; ++r) {
    detail::Rng rng(detail::derive_seed(seed, r));
    std::snprintf(name, sizeof(name), "references/r%05zu.pgm", r);
    manifest.references.push_back(
        {name, std::make_shared<const GrayImage>(make_reference(options.image_size, rng))});
  }

  detail::Rng gt_rng(detail::derive_seed(seed, kGtStream));
  for (std::size_t i = 0; i < n_queries; ++i) {
    const std::size_t gt = gt_rng.below(n_refs);
    const GrayImage& ref = *manifest.references[gt].image;
    detail::Rng rng(detail::derive_seed(seed, kQueryStream + i));
    std::vector<double> px(ref.pixels().begin(), ref.pixels().end());
    if (options.noise_sigma > 0.0) {
      for (double& p : px) p = std::clamp(p + options.noise_sigma * rng.normal(), 0.0, 1.0);
    }
    GrayImage query(ref.width(), ref.height(), std::move(px));
    for (const auto& regime : regimes) {
      if (i >= regime.begin && i < regime.end) {
        query = perturb(query, regime.perturbation, rng.next());
      }
    }
    std::snprintf(name, sizeof(name), "queries/q%05zu.pgm", i);
    manifest.queries.push_back({name, gt, std::make_shared<const GrayImage>(std::move(query))});
  }
  return manifest;
}

}  // namespace switchhit
