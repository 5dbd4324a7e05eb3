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

#include "switchhit/stats.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "switchhit/error.hpp"
#include "util.hpp"

namespace switchhit {

namespace {
constexpr double kSumTolerance = 1e-12;
}

std::size_t bin_of(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "score outside [0,1]");
  }
  // Compare against the same b/10 doubles that define the bin edges so the
  // partition is exact regardless of rounding in score * 10.
  auto b = static_cast<std::size_t>(std::floor(score * 10.0));
  if (b > 0 && score < static_cast<double>(b) / 10.0) --b;
  if (b < kBinCount && score >= static_cast<double>(b + 1) / 10.0) ++b;
  return std::min(b, kBinCount - 1);
}

void TechniqueProfile::validate() const {
  const auto in_open_unit = [](double p) { return p > 0.0 && p < 1.0; };
  if (!in_open_unit(prior_match) || !in_open_unit(prior_mismatch)) {
    throw Error(ErrorCode::kSchema, "probability out of range (prior)");
  }
  if (std::abs(prior_match + prior_mismatch - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kSchema, "priors do not sum to 1");
  }
  std::size_t total = 0;
  for (std::size_t b = 0; b < kBinCount; ++b) {
    const auto& l = likelihood[b];
    const auto& c = counts[b];
    if (!in_open_unit(l.match) || !in_open_unit(l.mismatch)) {
      throw Error(ErrorCode::kSchema, "probability out of range (bin " + std::to_string(b) + ")");
    }
    if (std::abs(l.match + l.mismatch - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::kSchema,
                  "bin likelihoods do not sum to 1 (bin " + std::to_string(b) + ")");
    }
    if (c.matches + c.mismatches != c.total) {
      throw Error(ErrorCode::kSchema, "bin counts inconsistent (bin " + std::to_string(b) + ")");
    }
    total += c.total;
  }
  if (training_size == 0 || total != training_size) {
    throw Error(ErrorCode::kSchema, "bin totals do not match training_size");
  }
}

TechniqueProfile train_profile(const std::string& technique,
                               std::span<const ScoredOutcome> results) {
  if (results.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training results");
  TechniqueProfile p;
  p.technique = technique;
  p.training_size = results.size();
  std::size_t correct = 0;
  for (const auto& r : results) {
    auto& c = p.counts[bin_of(r.candidate.score)];
    ++c.total;
    if (r.correct) {
      ++c.matches;
      ++correct;
    } else {
      ++c.mismatches;
    }
  }
  const double n = static_cast<double>(results.size());
  p.prior_match = (static_cast<double>(correct) + 1.0) / (n + 2.0);
  p.prior_mismatch = (static_cast<double>(results.size() - correct) + 1.0) / (n + 2.0);
  for (std::size_t b = 0; b < kBinCount; ++b) {
    const auto& c = p.counts[b];
    const double x = static_cast<double>(c.total) + 2.0;
    p.likelihood[b] = {(static_cast<double>(c.matches) + 1.0) / x,
                       (static_cast<double>(c.mismatches) + 1.0) / x};
  }
  return p;
}

std::string profile_to_json(const TechniqueProfile& profile) {
  using detail::format_double;
  std::ostringstream out;
  out << "{\n  \"technique\": " << nlohmann::json(profile.technique).dump() << ",\n"
      << "  \"prior\": {\"pm\": " << format_double(profile.prior_match)
      << ", \"pmm\": " << format_double(profile.prior_mismatch) << "},\n"
      << "  \"bins\": [\n";
  for (std::size_t b = 0; b < kBinCount; ++b) {
    const auto& c = profile.counts[b];
    const auto& l = profile.likelihood[b];
    out << "    {\"w\": " << c.matches << ", \"y\": " << c.mismatches << ", \"x\": " << c.total
        << ", \"pzm\": " << format_double(l.match) << ", \"pzmm\": " << format_double(l.mismatch)
        << "}" << (b + 1 < kBinCount ? ",\n" : "\n");
  }
  out << "  ],\n  \"training_size\": " << profile.training_size << "\n}\n";
  return out.str();
}

TechniqueProfile profile_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed profile: ") + e.what());
  }
  TechniqueProfile p;
  try {
    p.technique = doc.at("technique").get<std::string>();
    p.prior_match = doc.at("prior").at("pm").get<double>();
    p.prior_mismatch = doc.at("prior").at("pmm").get<double>();
    const auto& bins = doc.at("bins");
    if (!bins.is_array() || bins.size() != kBinCount) {
      throw Error(ErrorCode::kSchema, "schema mismatch: expected 10 bins");
    }
    for (std::size_t b = 0; b < kBinCount; ++b) {
      const auto& e = bins[b];
      p.counts[b] = {e.at("w").get<std::size_t>(), e.at("y").get<std::size_t>(),
                     e.at("x").get<std::size_t>()};
      p.likelihood[b] = {e.at("pzm").get<double>(), e.at("pzmm").get<double>()};
    }
    p.training_size = doc.at("training_size").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("schema mismatch: ") + e.what());
  }
  p.validate();
  return p;
}

void save_profile(const TechniqueProfile& profile, const std::filesystem::path& path) {
  profile.validate();
  detail::write_text_file(path, profile_to_json(profile));
}

TechniqueProfile load_profile(const std::filesystem::path& path) {
  try {
    return profile_from_json(detail::read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace switchhit
