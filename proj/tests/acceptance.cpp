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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "switchhit/error.hpp"
#include "switchhit/pipeline.hpp"

namespace sh = switchhit;
namespace t = switchhit::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_s > 0 && elapsed >= budget_s) {
    v.require(false, "runtime " + std::to_string(elapsed) + " s over budget");
  }
  failures += v.pass ? 0 : 1;
  std::printf("criterion %d: %s - %s (%s) [%.2f s]\n", id, v.pass ? "PASS" : "FAIL", title,
              v.detail.c_str(), elapsed);
  std::fflush(stdout);
}

// Random joint count table: W and Y per bin.
struct CountTable {
  std::array<std::size_t, sh::kBinCount> w{}, y{};
};

CountTable random_table(std::mt19937_64& rng) {
  CountTable c;
  std::uniform_int_distribution<std::size_t> size(0, 60);
  std::bernoulli_distribution empty(0.15);
  for (std::size_t b = 0; b < sh::kBinCount; ++b) {
    c.w[b] = empty(rng) ? 0 : size(rng);
    c.y[b] = empty(rng) ? 0 : size(rng);
  }
  if (std::accumulate(c.w.begin(), c.w.end(), std::size_t{0}) +
          std::accumulate(c.y.begin(), c.y.end(), std::size_t{0}) ==
      0) {
    c.w[0] = 1;
  }
  return c;
}

// Raw outcomes realizing a count table; scores sit anywhere inside each bin.
std::vector<sh::ScoredOutcome> outcomes_for(const CountTable& c, std::mt19937_64& rng) {
  std::vector<sh::ScoredOutcome> out;
  std::uniform_real_distribution<double> offset(0.0, 0.1);
  for (std::size_t b = 0; b < sh::kBinCount; ++b) {
    for (std::size_t i = 0; i < c.w[b] + c.y[b]; ++i) {
      double s = std::min(b / 10.0 + offset(rng), 1.0);
      if (sh::bin_of(s) != b) s = b / 10.0;
      out.push_back({{0, s}, i < c.w[b]});
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Posterior from raw integers; the (N+2) and (X+2) denominators cancel.
double oracle_posterior(const CountTable& c, std::size_t bin) {
  const double C = static_cast<double>(std::accumulate(c.w.begin(), c.w.end(), std::size_t{0}));
  const double I = static_cast<double>(std::accumulate(c.y.begin(), c.y.end(), std::size_t{0}));
  const double m = (C + 1) * (c.w[bin] + 1.0);
  const double mm = (I + 1) * (c.y[bin] + 1.0);
  return m / (m + mm);
}

// Bin by direct interval membership against decimal edges.
std::size_t oracle_bin(double s) {
  for (std::size_t b = 0; b + 1 < sh::kBinCount; ++b) {
    if (s < (b + 1) / 10.0) return b;
  }
  return sh::kBinCount - 1;
}

sh::ProfileMap profiles_for(const sh::DatasetManifest& train, const sh::TechniqueMap& techniques) {
  return t::train_profiles(train, techniques);
}

// Criterion 1 ------------------------------------------------------------------

Verdict bayes_oracle() {
  Verdict v;
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  const int tables = 2000;
  for (int n = 0; n < tables; ++n) {
    const auto table = random_table(rng);
    const auto outcomes = outcomes_for(table, rng);
    const auto profile = sh::train_profile("t", outcomes);
    for (std::size_t b = 0; b < sh::kBinCount; ++b) {
      const double diff = std::abs(sh::posterior(profile, b) - oracle_posterior(table, b));
      worst = std::max(worst, diff);
    }
  }
  v.require(worst <= 1e-12, "max abs error " + std::to_string(worst));
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d tables, max abs error %.3g", tables, worst);
  if (v.pass) v.detail = buf;
  return v;
}

// Criterion 2 ------------------------------------------------------------------

void check_soundness(Verdict& v, const sh::TechniqueProfile& p,
                     std::span<const sh::ScoredOutcome> outcomes) {
  const auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  v.require(std::abs(p.prior_match + p.prior_mismatch - 1.0) <= 1e-15, "priors do not sum to 1");
  v.require(open_unit(p.prior_match) && open_unit(p.prior_mismatch), "prior outside (0,1)");
  std::array<std::size_t, sh::kBinCount> w{}, x{};
  for (const auto& o : outcomes) {
    const auto b = oracle_bin(o.candidate.score);
    ++x[b];
    w[b] += o.correct ? 1 : 0;
  }
  for (std::size_t b = 0; b < sh::kBinCount; ++b) {
    const auto& l = p.likelihood[b];
    v.require(std::abs(l.match + l.mismatch - 1.0) <= 1e-15,
              "bin " + std::to_string(b) + " likelihoods do not sum to 1");
    v.require(open_unit(l.match) && open_unit(l.mismatch), "likelihood outside (0,1)");
    v.require(p.counts[b].matches == w[b] && p.counts[b].total == x[b],
              "bin " + std::to_string(b) + " W/X differs from filter-and-count");
  }
}

Verdict likelihood_soundness() {
  Verdict v;
  std::mt19937_64 rng(2002);
  std::size_t profiles = 0;
  // Random scores including exact bin edges.
  for (int n = 0; n < 500; ++n) {
    std::uniform_int_distribution<int> len(1, 300);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution edge(0.2), hit(0.6);
    std::vector<sh::ScoredOutcome> outcomes(len(rng));
    for (auto& o : outcomes) {
      const double s = edge(rng) ? std::uniform_int_distribution<int>(0, 10)(rng) / 10.0 : u(rng);
      o = {{0, s}, hit(rng)};
    }
    check_soundness(v, sh::train_profile("r", outcomes), outcomes);
    ++profiles;
  }
  // Profiles trained from the real matchers.
  const auto data = t::complementary_dataset(31, 100);
  const auto techniques = t::build_techniques(
      data, {{"tiny", t::tiny_config()}, {"hog", t::hog_config()}, {"hist", t::histogram_config()}});
  for (const auto& [name, technique] : techniques) {
    std::vector<sh::ScoredOutcome> outcomes;
    for (const auto& q : data.queries) {
      const auto c = technique->best_match(*q.image);
      outcomes.push_back({c, sh::is_correct(c, q.gt, data.tolerance)});
    }
    const auto p = sh::train_profile(name, outcomes);
    check_soundness(v, p, outcomes);
    p.validate();
    ++profiles;
  }
  if (v.pass) v.detail = std::to_string(profiles) + " profiles sound";
  return v;
}

// Criterion 3 ------------------------------------------------------------------

sh::TechniqueProfile profile_from_table(const std::string& name, const CountTable& c) {
  std::mt19937_64 rng(7);
  return sh::train_profile(name, outcomes_for(c, rng));
}

Verdict complementarity_correctness() {
  Verdict v;
  std::mt19937_64 rng(3003);
  double worst = 0.0;
  std::size_t argmax_checks = 0;
  std::vector<double> factors;
  for (int i = 0; i < 20; ++i) factors.push_back(std::pow(10.0, -3.0 + 6.0 * i / 19.0));

  for (int n = 0; n < 200; ++n) {
    const auto ta = random_table(rng);
    const auto a = profile_from_table("a", ta);
    std::vector<CountTable> tb;
    std::vector<sh::TechniqueProfile> bs;
    for (int k = 0; k < 4; ++k) {
      tb.push_back(random_table(rng));
      bs.push_back(profile_from_table("b" + std::to_string(k), tb.back()));
    }
    for (std::size_t bin = 0; bin < sh::kBinCount; ++bin) {
      // Raw-count form: (W_A+1)(W_B+1) / ((Y_A+1)(Y_B+1)).
      std::size_t exact_best = 0;
      for (std::size_t k = 0; k < bs.size(); ++k) {
        const double expect = (ta.w[bin] + 1.0) * (tb[k].w[bin] + 1.0) /
                              ((ta.y[bin] + 1.0) * (tb[k].y[bin] + 1.0));
        const double got = sh::complementarity(a, bs[k], bin).value;
        worst = std::max(worst, std::abs(got - expect) / expect);
        // A's factors are common, so compare (W_B+1)/(Y_B+1) in integers.
        const auto& cand = tb[k];
        const auto& best = tb[exact_best];
        if ((cand.w[bin] + 1) * (best.y[bin] + 1) > (best.w[bin] + 1) * (cand.y[bin] + 1)) {
          exact_best = k;
        }
      }
      for (double f : factors) {
        auto scaled = a;
        scaled.likelihood[bin].match *= f;
        scaled.likelihood[bin].mismatch *= f;
        std::size_t best = 0;
        double best_value = sh::complementarity(scaled, bs[0], bin).value;
        for (std::size_t k = 1; k < bs.size(); ++k) {
          const double value = sh::complementarity(scaled, bs[k], bin).value;
          if (value > best_value) {
            best = k;
            best_value = value;
          }
        }
        v.require(best == exact_best, "argmax changed under factor " + std::to_string(f));
        ++argmax_checks;
      }
    }
  }
  v.require(worst <= 1e-12, "max relative error " + std::to_string(worst));
  char buf[160];
  std::snprintf(buf, sizeof buf, "max relative error %.3g, %zu argmax checks over 20 factors",
                worst, argmax_checks);
  if (v.pass) v.detail = buf;
  return v;
}

// Criterion 4 ------------------------------------------------------------------

Verdict threshold_identities() {
  Verdict v;
  const auto full = t::complementary_dataset(41, 200);
  const auto [train, test] = sh::split(full, {0.5, 41});
  v.require(test.query_count() == 100, "test split is not 100 queries");
  const auto techniques = t::build_techniques(
      full, {{"tiny", t::tiny_config()}, {"hog", t::hog_config()}, {"hist", t::histogram_config()}});
  const auto profiles = profiles_for(train, techniques);
  const std::vector<std::string> combo = {"tiny", "hog", "hist"};
  const auto all = sh::run_all(test, combo, techniques);

  const auto zero = sh::run_dataset(test, {combo, 0.0, {}}, profiles, techniques);
  for (std::size_t i = 0; i < zero.size(); ++i) {
    const auto& c = zero[i].accepted_candidate();
    v.require(zero[i].attempts.size() == 1 && zero[i].accepted_technique() == "tiny",
              "threshold 0 switched on query " + std::to_string(i));
    v.require(c.reference_index == all.at("tiny")[i].reference_index &&
                  c.score == all.at("tiny")[i].score,
              "threshold 0 differs from primary on query " + std::to_string(i));
  }

  const auto one = sh::run_dataset(test, {combo, 1.0, {}}, profiles, techniques);
  std::size_t ties = 0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    // Run-all oracle: every technique scored independently, argmax posterior,
    // ties resolved by attempt order.
    std::vector<std::string> order;
    for (const auto& a : one[i].attempts) order.push_back(a.technique);
    v.require(order.size() == combo.size(), "threshold 1 did not try every technique");
    std::string best;
    double best_post = -1.0;
    std::size_t at_max = 0;
    for (const auto& name : order) {
      const auto& c = all.at(name)[i];
      const double p = sh::posterior(profiles.at(name), sh::bin_of(c.score));
      if (p > best_post) {
        best = name;
        best_post = p;
        at_max = 1;
      } else if (p == best_post) {
        ++at_max;
      }
    }
    ties += at_max > 1 ? 1 : 0;
    const auto& expect = all.at(best)[i];
    const auto& got = one[i].accepted_candidate();
    v.require(one[i].accepted_technique() == best && got.reference_index == expect.reference_index &&
                  got.score == expect.score && one[i].accepted().posterior == best_post,
              "threshold 1 differs from run-all oracle on query " + std::to_string(i));
    v.require(one[i].mode == sh::AcceptanceMode::kMaxPosteriorFallback, "threshold 1 passed a query");
  }
  if (v.pass) {
    v.detail = "100 queries identical at both thresholds (" + std::to_string(ties) + " posterior ties)";
  }
  return v;
}

// Criterion 5 ------------------------------------------------------------------

Verdict complementarity_gain() {
  Verdict v;
  const auto test = t::complementary_dataset(11, 200);
  const auto train = t::complementary_dataset(12, 200);
  const std::vector<std::pair<std::string, sh::MatcherConfig>> specs = {
      {"tiny", t::tiny_config()}, {"hist", t::histogram_config()}};
  const auto profiles = profiles_for(train, t::build_techniques(train, specs));
  const auto techniques = t::build_techniques(test, specs);
  const std::vector<std::string> combo = {"tiny", "hist"};
  const auto all = sh::run_all(test, combo, techniques);
  const auto traces = sh::run_dataset(test, {combo, 0.5, {}}, profiles, techniques);

  const std::size_t sw = t::count_correct(traces, test);
  const std::size_t tiny = t::count_correct(all.at("tiny"), test);
  const std::size_t hist = t::count_correct(all.at("hist"), test);

  // Per-regime accuracy of the degraded matcher.
  const auto regime_rate = [&](const std::string& name, std::size_t lo, std::size_t hi) {
    std::size_t hits = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      hits += sh::is_correct(all.at(name)[i], test.queries[i].gt, test.tolerance) ? 1 : 0;
    }
    return static_cast<double>(hits) / (hi - lo);
  };
  const double hist_fail = regime_rate("hist", 0, 80);
  const double tiny_fail = regime_rate("tiny", 80, 160);

  v.require(sw >= tiny && sw >= hist, "SwitchHit below an individual technique");
  v.require(sw >= std::max(tiny, hist) + 5, "margin under 5");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "switchhit %zu, tiny %zu, hist %zu, margin %lld; regime accuracy hist %.2f tiny %.2f",
                sw, tiny, hist, static_cast<long long>(sw) - static_cast<long long>(std::max(tiny, hist)),
                hist_fail, tiny_fail);
  v.detail = v.pass ? std::string(buf) : v.detail + "; " + buf;
  return v;
}

// Criterion 6 ------------------------------------------------------------------

Verdict no_switch_conservatism() {
  Verdict v;
  const std::vector<sh::FailureRegime> regimes = {
      {"histogram", 0, 60, {sh::PerturbationKind::kBlur, 4.0, 1.0}},
      {"histogram", 60, 120, {sh::PerturbationKind::kOcclusion, 0.15, 1.0}},
      {"tiny", 120, 160, {sh::PerturbationKind::kBrightness, 0.7, 1.0}}};
  const auto train = sh::generate_synthetic(200, 50, regimes, 61);
  const auto test = sh::generate_synthetic(200, 50, regimes, 62);
  const std::vector<std::pair<std::string, sh::MatcherConfig>> specs = {
      {"tiny", t::tiny_config()}, {"hog", t::hog_config()}, {"hist", t::histogram_config()}};
  const auto profiles = profiles_for(train, t::build_techniques(train, specs));
  for (std::size_t b = 0; b < sh::kBinCount; ++b) {
    v.require(sh::posterior(profiles.at("tiny"), b) >= 0.5,
              "primary posterior below threshold in bin " + std::to_string(b));
  }
  const auto techniques = t::build_techniques(test, specs);
  const std::vector<std::string> combo = {"tiny", "hog", "hist"};
  const auto all = sh::run_all(test, combo, techniques);
  const auto traces = sh::run_dataset(test, {combo, 0.5, {}}, profiles, techniques);
  std::size_t switches = 0;
  for (const auto& tr : traces) switches += tr.attempts.size() > 1 ? 1 : 0;
  const std::size_t sw = t::count_correct(traces, test);
  const std::size_t primary = t::count_correct(all.at("tiny"), test);
  v.require(switches == 0, std::to_string(switches) + " queries switched");
  v.require(sw == primary, "counts differ");
  const std::string info = "switchhit " + std::to_string(sw) + ", tiny " + std::to_string(primary) +
                           ", hist " + std::to_string(t::count_correct(all.at("hist"), test)) +
                           ", switches " + std::to_string(switches);
  v.detail = v.pass ? info : v.detail + "; " + info;
  return v;
}

// Criterion 7 ------------------------------------------------------------------

Verdict pr_auc_machinery() {
  Verdict v;
  const std::vector<sh::ScoredLabel> three = {{0.9, true}, {0.8, false}, {0.7, true}};
  const auto curve = sh::pr_curve(three);
  const auto find = [&](double thr) -> const sh::PRPoint* {
    for (const auto& p : curve) {
      if (p.threshold == thr) return &p;
    }
    return nullptr;
  };
  const auto expect = [&](double thr, double p, double r) {
    const auto* pt = find(thr);
    v.require(pt && pt->precision == p && pt->recall == r,
              "3-point curve wrong at t=" + std::to_string(thr));
  };
  expect(0.9, 1.0, 1.0 / 3);
  expect(0.8, 1.0 / 2, 1.0 / 3);
  expect(0.7, 2.0 / 3, 2.0 / 3);

  const std::vector<sh::PRPoint> flat = {{1, 1, 0}, {0, 1, 1}};
  const std::vector<sh::PRPoint> line = {{1, 1, 0}, {0, 0, 1}};
  const std::vector<sh::PRPoint> tri = {{1, 1, 0}, {0.5, 0.8, 0.5}, {0, 0.6, 1.0}};
  v.require(sh::auc(flat) == 1.0, "constant-precision AUC");
  v.require(sh::auc(line) == 0.5, "straight-line AUC");
  v.require(std::abs(sh::auc(tri) - 0.80) <= 1e-15, "3-point trapezoid AUC");

  std::mt19937_64 rng(7007);
  for (int n = 0; n < 100; ++n) {
    std::uniform_int_distribution<int> len(1, 200);
    std::uniform_int_distribution<int> grid(0, 20);
    std::bernoulli_distribution hit(0.5);
    std::vector<sh::ScoredLabel> r(len(rng));
    std::size_t correct = 0;
    for (auto& x : r) {
      x = {grid(rng) / 20.0, hit(rng)};
      correct += x.correct ? 1 : 0;
    }
    const auto c = sh::pr_curve(r);
    for (std::size_t i = 1; i < c.size(); ++i) {
      v.require(c[i].threshold < c[i - 1].threshold, "thresholds not decreasing");
      v.require(c[i].recall >= c[i - 1].recall, "recall not monotone in threshold");
    }
    v.require(c.back().threshold == 0.0 &&
                  c.back().recall == static_cast<double>(correct) / r.size(),
              "recall at threshold 0 is not total correct / N");
    try {
      const double a = sh::auc(c);
      v.require(a >= 0.0 && a <= 1.0, "AUC outside [0,1]");
    } catch (const sh::Error&) {
      // A single distinct (recall, precision) point has no area.
      std::vector<sh::PRPoint> uniq = c;
      std::sort(uniq.begin(), uniq.end(), [](const auto& a, const auto& b) {
        return a.recall < b.recall || (a.recall == b.recall && a.precision < b.precision);
      });
      uniq.erase(std::unique(uniq.begin(), uniq.end(), [](const auto& a, const auto& b) {
                   return a.recall == b.recall && a.precision == b.precision;
                 }), uniq.end());
      v.require(uniq.size() < 2, "auc rejected a curve with 2+ distinct points");
    }
  }
  if (v.pass) v.detail = "examples exact; 100 random sets monotone with AUC in [0,1]";
  return v;
}

// Criterion 8 ------------------------------------------------------------------

std::vector<std::string> pipeline_artifacts(const t::TempDir& dir) {
  const auto path = t::write_run_fixture(dir, t::complementary_dataset(81, 120), t::kThreeTechniques);
  const auto config = sh::load_run_config(path);
  std::ostringstream log;
  sh::cmd_train(config, log);
  sh::cmd_run(config, log);
  sh::cmd_eval(config, log);
  std::vector<std::string> out;
  for (const char* name : {"profiles/tiny.json", "profiles/hog.json", "profiles/hist.json",
                           "traces.csv", "report.json", "pr_tiny.csv", "pr_hog.csv",
                           "pr_hist.csv", "pr_switchhit.csv", "switch_pattern.csv"}) {
    out.push_back(t::slurp(dir / ("out/" + std::string(name))));
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  std::mt19937_64 rng(8008);
  t::TempDir dir;
  for (int n = 0; n < 200; ++n) {
    const auto p = profile_from_table("tech" + std::to_string(n), random_table(rng));
    const auto file = dir / "p.json";
    sh::save_profile(p, file);
    const auto back = sh::load_profile(file);
    v.require(back == p, "profile round-trip lossy");
    v.require(sh::profile_to_json(back) == t::slurp(file), "profile re-serialization differs");
  }
  t::TempDir first, second;
  const auto a = pipeline_artifacts(first);
  const auto b = pipeline_artifacts(second);
  for (std::size_t i = 0; i < a.size(); ++i) {
    v.require(!a[i].empty(), "empty artifact");
    v.require(a[i] == b[i], "artifact " + std::to_string(i) + " differs between runs");
  }
  if (v.pass) v.detail = "200 profiles lossless; 10 artifacts byte-identical across two runs";
  return v;
}

}  // namespace

int main() {
  criterion(1, "Bayes oracle equivalence", 5, bayes_oracle);
  criterion(2, "likelihood-table soundness", 5, likelihood_soundness);
  criterion(3, "complementarity correctness", 5, complementarity_correctness);
  criterion(4, "threshold identities", 30, threshold_identities);
  criterion(5, "constructed complementarity gain", 60, complementarity_gain);
  criterion(6, "no-switch conservatism", 0, no_switch_conservatism);
  criterion(7, "PR/AUC machinery", 5, pr_auc_machinery);
  criterion(8, "determinism and round-trips", 60, determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
