#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qba/correlators.hpp"
#include "qba/detector.hpp"
#include "qba/protocol.hpp"

using namespace qba;

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::uint64_t backsolved_n(double value, double err) {
  return static_cast<std::uint64_t>(
      std::llround((1.0 - value * value) / (err * err)));
}

// Estimates built from the reference dataset, sample counts recovered from
// the published standard errors.
std::vector<CorrelatorEstimate> reference_estimates() {
  std::vector<CorrelatorEstimate> ests;
  for (const auto& row : table1_reference()) {
    CorrelatorEstimate est;
    est.key = row.key;
    est.value = row.experimental;
    est.std_err = row.experimental_err;
    est.n = backsolved_n(row.experimental, row.experimental_err);
    ests.push_back(est);
  }
  return ests;
}

std::vector<double> reference_predictions() {
  std::vector<double> preds;
  for (const auto& row : table1_reference()) preds.push_back(row.theory);
  return preds;
}

// Perfect dataset: every estimate equals the exact prediction.
std::vector<CorrelatorEstimate> exact_estimates(std::uint64_t n) {
  std::vector<CorrelatorEstimate> ests;
  for (const auto& key : all_correlator_keys()) {
    CorrelatorEstimate est;
    est.key = key;
    est.value = theoretical(key, Scenario::honest());
    est.std_err = plug_in_std_err(est.value, n);
    est.n = n;
    ests.push_back(est);
  }
  return ests;
}

std::vector<double> honest_predictions() {
  std::vector<double> preds;
  for (const auto& key : all_correlator_keys()) {
    preds.push_back(theoretical(key, Scenario::honest()));
  }
  return preds;
}

}  // namespace

TEST_CASE("the reference dataset passes at the default threshold") {
  const auto ests = reference_estimates();
  const auto preds = reference_predictions();
  for (const auto& est : ests) CHECK(est.n >= 200);

  const auto verdict = decide(ests, preds, DetectorConfig{});
  CHECK(verdict.kind == Verdict::Kind::Accept);

  // The worst row sits near 3.08 standard errors: (2/3 - 0.602) / 0.021.
  double max_z = 0.0;
  CorrelatorKey max_key = ests[0].key;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    const double z = z_score(ests[i].value, preds[i], ests[i].std_err);
    if (z > max_z) {
      max_z = z;
      max_key = ests[i].key;
    }
  }
  CHECK(near(max_z, (2.0 / 3.0 - 0.602) / 0.021, 1e-12));
  CHECK(near(max_z, 3.08, 0.05));
  CHECK(max_key == CorrelatorKey(Qubit::A, Qubit::C, Basis::X));
}

TEST_CASE("a flat zero where a third is expected aborts loudly") {
  auto ests = exact_estimates(1500);
  const auto preds = honest_predictions();
  const CorrelatorKey target{Qubit::C, Qubit::D, Basis::X};
  for (auto& est : ests) {
    if (est.key == target) {
      est.value = 0.0;
      est.std_err = 0.025;
    }
  }
  const auto verdict = decide(ests, preds, DetectorConfig{});
  REQUIRE(verdict.kind == Verdict::Kind::Abort);
  REQUIRE(verdict.violations.size() == 1);
  CHECK(verdict.violations[0].key == target);
  CHECK(near(verdict.violations[0].z, 13.33, 0.01));
}

TEST_CASE("exact agreement is accepted") {
  const auto verdict =
      decide(exact_estimates(250), honest_predictions(), DetectorConfig{});
  CHECK(verdict.kind == Verdict::Kind::Accept);
  CHECK(verdict.violations.empty());
}

TEST_CASE("thin samples are reported as insufficient") {
  auto ests = exact_estimates(1000);
  ests[3].n = 199;
  ests[7].n = 0;
  const auto verdict = decide(ests, honest_predictions(), DetectorConfig{});
  REQUIRE(verdict.kind == Verdict::Kind::InsufficientData);
  REQUIRE(verdict.insufficient.size() == 2);
  CHECK(verdict.insufficient[0] == ests[3].key);
  CHECK(verdict.insufficient[1] == ests[7].key);
}

TEST_CASE("zero spread means certainty") {
  auto ests = exact_estimates(1000);
  const auto preds = honest_predictions();
  ests[0].value = preds[0];
  ests[0].std_err = 0.0;
  CHECK(decide(ests, preds, DetectorConfig{}).kind == Verdict::Kind::Accept);

  ests[0].value = preds[0] + 1e-9;
  const auto verdict = decide(ests, preds, DetectorConfig{});
  REQUIRE(verdict.kind == Verdict::Kind::Abort);
  CHECK(std::isinf(verdict.violations[0].z));
}

TEST_CASE("accepting at one threshold accepts at every larger one") {
  const auto ests = reference_estimates();
  const auto preds = reference_predictions();
  bool accepted = false;
  for (double threshold : {2.0, 3.0, 3.1, 4.0, 6.0}) {
    const auto verdict = decide(ests, preds, DetectorConfig{threshold, 200});
    if (accepted) CHECK(verdict.kind == Verdict::Kind::Accept);
    if (verdict.kind == Verdict::Kind::Accept) accepted = true;
  }
  // The reference data sits between 3.0 and 3.1 standard errors.
  CHECK(decide(ests, preds, DetectorConfig{3.0, 200}).kind ==
        Verdict::Kind::Abort);
  CHECK(decide(ests, preds, DetectorConfig{3.1, 200}).kind ==
        Verdict::Kind::Accept);
}

TEST_CASE("the verdict ignores estimate ordering") {
  auto ests = reference_estimates();
  auto preds = reference_predictions();
  std::vector<std::size_t> order(ests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 shuffle_rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    std::vector<CorrelatorEstimate> shuffled_ests;
    std::vector<double> shuffled_preds;
    for (std::size_t i : order) {
      shuffled_ests.push_back(ests[i]);
      shuffled_preds.push_back(preds[i]);
    }
    const auto a = decide(ests, preds, DetectorConfig{3.0, 200});
    const auto b = decide(shuffled_ests, shuffled_preds,
                          DetectorConfig{3.0, 200});
    CHECK(a.kind == b.kind);
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
      CHECK(a.violations[i].key == b.violations[i].key);
    }
  }
}

TEST_CASE("malformed estimate sets are rejected") {
  auto ests = reference_estimates();
  const auto preds = reference_predictions();
  ests[1].key = ests[0].key;  // duplicate, and one key now missing
  CHECK_THROWS_AS(decide(ests, preds, DetectorConfig{}),
                  std::invalid_argument);

  auto short_ests = reference_estimates();
  short_ests.pop_back();
  auto short_preds = preds;
  short_preds.pop_back();
  CHECK_THROWS_AS(decide(short_ests, short_preds, DetectorConfig{}),
                  std::invalid_argument);

  CHECK_THROWS_AS(decide(reference_estimates(), short_preds,
                         DetectorConfig{}),
                  std::invalid_argument);
}

TEST_CASE("bad configurations are rejected") {
  CHECK_THROWS_AS(decide(reference_estimates(), reference_predictions(),
                         DetectorConfig{0.0, 200}),
                  std::invalid_argument);
  CHECK_THROWS_AS(decide(reference_estimates(), reference_predictions(),
                         DetectorConfig{4.0, 0}),
                  std::invalid_argument);
}

TEST_CASE("simulated datasets separate cleanly at moderate size") {
  const auto preds = honest_predictions();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto attacked = run_distribution(40000, AttackCase::I,
                                           AttackBasisPolicy::always_z(),
                                           6000 + s);
    const auto av =
        decide(estimate_all(attacked.records), preds, DetectorConfig{});
    CHECK(av.kind == Verdict::Kind::Abort);
    CHECK(av.cites(CorrelatorKey{Qubit::C, Qubit::D, Basis::X}));
  }
}

// Power at roughly 1e4 samples per key: 40000 rounds leave each cross pair
// with about a quarter of the rounds.
TEST_CASE("abort and accept rates hold over 100 seeds") {
  const auto preds = honest_predictions();
  int accepts = 0;
  int aborts = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto honest = run_distribution(40000, AttackCase::None,
                                         AttackBasisPolicy::always_z(),
                                         5000 + s);
    if (decide(estimate_all(honest.records), preds, DetectorConfig{}).kind ==
        Verdict::Kind::Accept) {
      ++accepts;
    }
    const auto attacked = run_distribution(40000, AttackCase::II,
                                           AttackBasisPolicy::always_x(),
                                           7000 + s);
    if (decide(estimate_all(attacked.records), preds, DetectorConfig{})
            .kind == Verdict::Kind::Abort) {
      ++aborts;
    }
  }
  CHECK(accepts >= 95);
  CHECK(aborts >= 99);
}
