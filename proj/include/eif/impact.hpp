#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eif/error.hpp"
#include "eif/preference.hpp"

namespace eif {

/// Per-event impact: raw values in [0, 1] and their L1-normalized event
/// impact factors (EIF).
struct ImpactVector {
  ItemSet items;
  std::vector<double> raw;
  std::vector<double> normalized;

  std::size_t size() const noexcept { return raw.size(); }
  friend bool operator==(const ImpactVector&, const ImpactVector&) = default;
};

/// I_i = 1/2 (1 + log9 of the geometric mean of row i, diagonal included).
inline std::vector<double> raw_impact(const ReciprocalMatrix& m) {
  const std::size_t n = m.size();
  const double log9 = std::log(kScaleMax);
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    double log_sum = 0.0;
    for (double x : m.row(i)) log_sum += std::log(x);
    const double value = 0.5 * (1.0 + log_sum / static_cast<double>(n) / log9);
    // entries may overshoot the scale by the matrix tolerance
    raw[i] = std::clamp(value, 0.0, 1.0);
  }
  return raw;
}

inline ImpactVector impact_vector(const ReciprocalMatrix& m) {
  auto raw = raw_impact(m);
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::DegenerateImpact, "every raw impact is zero");
  }
  std::vector<double> normalized(raw.size());
  std::transform(raw.begin(), raw.end(), normalized.begin(),
                 [total](double x) { return x / total; });
  return ImpactVector{m.items(), std::move(raw), std::move(normalized)};
}

/// Labels with their EIF, highest first; equal EIFs keep item order.
inline std::vector<std::pair<std::string, double>> rank_events(const ImpactVector& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return v.normalized[a] > v.normalized[b];
  });
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(order.size());
  for (std::size_t i : order) ranked.emplace_back(v.items[i], v.normalized[i]);
  return ranked;
}

inline std::vector<std::string> select_best(const ImpactVector& v, std::size_t s) {
  if (s < 1 || s > v.size()) {
    throw Error(ErrorCode::SOutOfRange, "s = " + std::to_string(s) + " outside 1.." +
                                            std::to_string(v.size()));
  }
  auto ranked = rank_events(v);
  std::vector<std::string> best;
  best.reserve(s);
  for (std::size_t i = 0; i < s; ++i) best.push_back(std::move(ranked[i].first));
  return best;
}

}  // namespace eif
