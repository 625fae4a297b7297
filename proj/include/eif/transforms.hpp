#pragma once

// Conversions from each preference structure to a ReciprocalMatrix.
//
// Only the strict upper triangle is computed; the lower half is mirrored as
// 1/x by ReciprocalMatrix::from_upper, so reciprocity holds exactly up to a
// single division.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "eif/error.hpp"
#include "eif/preference.hpp"

namespace eif {

struct TransformConfig {
  /// Exponent applied to utility ratios.
  double z = 1.0;
  /// Rescale rating matrices so their largest entry becomes exactly 9.
  bool normalize = true;

  friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

inline void validate(const TransformConfig& cfg) {
  if (!(cfg.z > 0.0) || !std::isfinite(cfg.z)) {
    throw Error(ErrorCode::InvalidConfig, "z must be a positive finite number, got " +
                                              std::to_string(cfg.z));
  }
}

namespace detail {

/// Largest entry of the full matrix described by a positive upper triangle.
inline double max_reciprocal_entry(std::span<const double> upper) {
  double m = 1.0;
  for (double x : upper) m = std::max({m, x, 1.0 / x});
  return m;
}

/// x -> x^(1/log9(m_max)), in place. Leaves an all-ones triangle untouched.
inline void normalize_upper(std::span<double> upper) {
  const double m_max = max_reciprocal_entry(upper);
  if (!(m_max > 1.0)) return;
  const double exponent = std::log(kScaleMax) / std::log(m_max);
  for (double& x : upper) x = std::pow(x, exponent);
}

}  // namespace detail

/// m_ij = 9^(s_i - s_j) with s_i = (n - rank_i) / (n - 1).
inline ReciprocalMatrix ordering_to_ccm(const Ordering& o) {
  const std::size_t n = o.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = static_cast<double>(static_cast<int>(n) - o.ranks()[i]) / static_cast<double>(n - 1);

  std::vector<double> upper;
  upper.reserve(upper_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(std::pow(kScaleMax, s[i] - s[j]));
  return ReciprocalMatrix::from_upper(o.items(), upper);
}

/// m_ij = (u_i / u_j)^z, then range-normalized when cfg.normalize.
/// Without normalization the ratios must already fit the 1/9..9 scale.
inline ReciprocalMatrix rating_to_ccm(const Rating& r, const TransformConfig& cfg = {}) {
  validate(cfg);
  const auto& u = r.utilities();
  const std::size_t n = r.size();
  std::vector<double> upper;
  upper.reserve(upper_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(std::pow(u[i] / u[j], cfg.z));
  if (cfg.normalize) detail::normalize_upper(upper);
  return ReciprocalMatrix::from_upper(r.items(), upper);
}

/// The lower triangle is the reciprocal of the given upper one.
inline ReciprocalMatrix pairwise_to_ccm(const PairwiseComparison& p) {
  return ReciprocalMatrix::from_upper(p.items(), p.upper());
}

/// Rescales a reciprocal matrix so its maximum entry maps to exactly 9.
inline ReciprocalMatrix normalize_reciprocal(const ReciprocalMatrix& m) {
  auto upper = m.upper();
  detail::normalize_upper(upper);
  return ReciprocalMatrix::from_upper(m.items(), upper);
}

/// Same as above for a raw reciprocal matrix, given by its strictly positive
/// upper triangle, whose range may exceed [1/9, 9].
inline ReciprocalMatrix normalize_reciprocal(const ItemSet& items, std::vector<double> raw_upper) {
  for (double x : raw_upper) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::ValueOutOfScale,
                  "raw reciprocal entry must be positive and finite, got " + std::to_string(x));
    }
  }
  detail::normalize_upper(raw_upper);
  return ReciprocalMatrix::from_upper(items, raw_upper);
}

}  // namespace eif
