// Accept/Abort hypothesis test: compares empirical correlators against the
// quantum predictions and flags any key whose deviation exceeds the
// configured number of standard errors.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "qba/correlators.hpp"

namespace qba {

struct DetectorConfig {
  double threshold_sigma = 4.0;
  std::uint64_t min_samples_per_key = 200;
};

inline void validate(const DetectorConfig& cfg) {
  if (!(cfg.threshold_sigma > 0.0)) {
    throw std::invalid_argument("detector: threshold_sigma must be positive");
  }
  if (cfg.min_samples_per_key == 0) {
    throw std::invalid_argument("detector: min_samples_per_key must be > 0");
  }
}

// |estimate - predicted| in units of the estimate's standard error. A zero
// standard error means the sample was constant: an exact match scores 0,
// any mismatch scores infinity.
inline double z_score(double estimate, double predicted, double std_err) {
  const double dev = std::abs(estimate - predicted);
  if (std_err == 0.0) {
    return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return dev / std_err;
}

struct Violation {
  CorrelatorKey key;
  double estimate = 0.0;
  double predicted = 0.0;
  double z = 0.0;
};

struct Verdict {
  enum class Kind { Accept, Abort, InsufficientData };
  Kind kind = Kind::Accept;
  std::vector<Violation> violations;        // nonempty iff Abort
  std::vector<CorrelatorKey> insufficient;  // nonempty iff InsufficientData

  bool accepted() const { return kind == Kind::Accept; }
  bool cites(const CorrelatorKey& key) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.key == key; });
  }
};

inline const char* verdict_name(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::Accept: return "ACCEPT";
    case Verdict::Kind::Abort: return "ABORT";
    case Verdict::Kind::InsufficientData: return "INSUFFICIENT";
  }
  return "?";
}

// Deterministic decision over all 12 keys. Estimates may arrive in any
// order but must cover each key exactly once; predictions align with the
// estimates entrywise.
inline Verdict decide(std::span<const CorrelatorEstimate> estimates,
                      std::span<const double> predictions,
                      const DetectorConfig& cfg) {
  validate(cfg);
  if (estimates.size() != predictions.size()) {
    throw std::invalid_argument("decide: estimates/predictions size mismatch");
  }
  const auto& keys = all_correlator_keys();
  std::array<const CorrelatorEstimate*, 12> by_key{};
  std::array<double, 12> pred_by_key{};
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto it = std::find(keys.begin(), keys.end(), estimates[i].key);
    if (it == keys.end()) {
      throw std::invalid_argument("decide: unknown correlator key");
    }
    const auto idx = static_cast<std::size_t>(it - keys.begin());
    if (by_key[idx] != nullptr) {
      throw std::invalid_argument("decide: duplicate correlator key " +
                                  estimates[i].key.label());
    }
    by_key[idx] = &estimates[i];
    pred_by_key[idx] = predictions[i];
  }
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (by_key[k] == nullptr) {
      throw std::invalid_argument("decide: missing correlator key " +
                                  keys[k].label());
    }
  }

  Verdict verdict;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (by_key[k]->n < cfg.min_samples_per_key) {
      verdict.insufficient.push_back(keys[k]);
    }
  }
  if (!verdict.insufficient.empty()) {
    verdict.kind = Verdict::Kind::InsufficientData;
    return verdict;
  }
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto& est = *by_key[k];
    const double z = z_score(est.value, pred_by_key[k], est.std_err);
    if (z > cfg.threshold_sigma) {
      verdict.violations.push_back({keys[k], est.value, pred_by_key[k], z});
    }
  }
  verdict.kind = verdict.violations.empty() ? Verdict::Kind::Accept
                                            : Verdict::Kind::Abort;
  return verdict;
}

}  // namespace qba
