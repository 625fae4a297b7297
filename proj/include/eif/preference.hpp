#pragma once

// Preference structures (orderings, ratings, pairwise comparisons) and the
// multiplicative-reciprocal matrix every one of them is turned into.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "eif/error.hpp"

namespace eif {

/// Upper bound of the comparison scale; matrices live in [1/kScaleMax, kScaleMax].
inline constexpr double kScaleMax = 9.0;
inline constexpr double kScaleMin = 1.0 / kScaleMax;
/// Slack allowed on range and reciprocity checks.
inline constexpr double kMatrixTolerance = 1e-9;

namespace detail {

inline void check_labels(const std::vector<std::string>& labels, std::size_t min_size) {
  if (labels.size() < min_size) {
    throw Error(ErrorCode::TooFewItems,
                "need at least " + std::to_string(min_size) + " labels, got " +
                    std::to_string(labels.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) throw Error(ErrorCode::EmptyLabel, "label must be non-empty");
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::DuplicateLabel, "duplicate label '" + label + "'", label);
    }
  }
}

inline bool in_scale(double v) noexcept {
  return std::isfinite(v) && v >= kScaleMin - kMatrixTolerance &&
         v <= kScaleMax + kMatrixTolerance;
}

}  // namespace detail

/// Ordered list of n >= 2 distinct, non-empty labels.
class ItemSet {
 public:
  explicit ItemSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    detail::check_labels(labels_, 2);
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  friend bool operator==(const ItemSet&, const ItemSet&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Throws ItemSetMismatch naming the first label where `a` and `b` diverge.
inline void require_same_items(const ItemSet& a, const ItemSet& b) {
  if (a == b) return;
  const std::size_t common = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (a[i] != b[i]) {
      throw Error(ErrorCode::ItemSetMismatch,
                  "item " + std::to_string(i) + " is '" + a[i] + "' vs '" + b[i] + "'",
                  a[i]);
    }
  }
  const auto& longer = a.size() > b.size() ? a : b;
  throw Error(ErrorCode::ItemSetMismatch,
              "item sets differ in size (" + std::to_string(a.size()) + " vs " +
                  std::to_string(b.size()) + ")",
              longer[common]);
}

/// Strict ranking: rank(i) is the 1-based place of item i, 1 being best.
class Ordering {
 public:
  const ItemSet& items() const noexcept { return items_; }
  const std::vector<int>& ranks() const noexcept { return ranks_; }
  std::size_t size() const noexcept { return ranks_.size(); }

  friend bool operator==(const Ordering&, const Ordering&) = default;
  friend Ordering make_ordering(ItemSet items, std::vector<int> ranks);

 private:
  Ordering(ItemSet items, std::vector<int> ranks)
      : items_(std::move(items)), ranks_(std::move(ranks)) {}

  ItemSet items_;
  std::vector<int> ranks_;
};

/// Positive utility per item. Ties are allowed.
class Rating {
 public:
  const ItemSet& items() const noexcept { return items_; }
  const std::vector<double>& utilities() const noexcept { return utilities_; }
  std::size_t size() const noexcept { return utilities_.size(); }

  friend bool operator==(const Rating&, const Rating&) = default;
  friend Rating make_rating(ItemSet items, std::vector<double> utilities);

 private:
  Rating(ItemSet items, std::vector<double> utilities)
      : items_(std::move(items)), utilities_(std::move(utilities)) {}

  ItemSet items_;
  std::vector<double> utilities_;
};

/// Strictly-upper-triangular judgments on the 1/9..9 scale, row-major:
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class PairwiseComparison {
 public:
  const ItemSet& items() const noexcept { return items_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return items_.size(); }

  friend bool operator==(const PairwiseComparison&, const PairwiseComparison&) = default;
  friend PairwiseComparison make_pairwise(ItemSet items, std::vector<double> upper);

 private:
  PairwiseComparison(ItemSet items, std::vector<double> upper)
      : items_(std::move(items)), upper_(std::move(upper)) {}

  ItemSet items_;
  std::vector<double> upper_;
};

inline std::size_t upper_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

inline Ordering make_ordering(ItemSet items, std::vector<int> ranks) {
  const std::size_t n = items.size();
  if (ranks.size() != n) {
    throw Error(ErrorCode::LengthMismatch,
                "ordering has " + std::to_string(ranks.size()) + " ranks for " +
                    std::to_string(n) + " items");
  }
  std::vector<std::optional<std::size_t>> owner(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = ranks[i];
    if (r < 1 || static_cast<std::size_t>(r) > n) {
      throw Error(ErrorCode::RankOutOfRange,
                  "rank " + std::to_string(r) + " of '" + items[i] + "' outside 1.." +
                      std::to_string(n),
                  items[i]);
    }
    auto& slot = owner[static_cast<std::size_t>(r - 1)];
    if (slot) {
      throw Error(ErrorCode::DuplicateRank,
                  "rank " + std::to_string(r) + " given to both '" + items[*slot] +
                      "' and '" + items[i] + "'",
                  items[i]);
    }
    slot = i;
  }
  return Ordering(std::move(items), std::move(ranks));
}

inline Rating make_rating(ItemSet items, std::vector<double> utilities) {
  if (utilities.size() != items.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "rating has " + std::to_string(utilities.size()) + " utilities for " +
                    std::to_string(items.size()) + " items");
  }
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const double u = utilities[i];
    if (!(u > 0.0) || !std::isfinite(u)) {
      throw Error(ErrorCode::NonPositiveUtility,
                  "utility of '" + items[i] + "' is " + std::to_string(u), items[i]);
    }
  }
  return Rating(std::move(items), std::move(utilities));
}

inline PairwiseComparison make_pairwise(ItemSet items, std::vector<double> upper) {
  const std::size_t n = items.size();
  if (upper.size() != upper_count(n)) {
    throw Error(ErrorCode::LengthMismatch,
                "pairwise comparison over " + std::to_string(n) + " items needs " +
                    std::to_string(upper_count(n)) + " values, got " +
                    std::to_string(upper.size()));
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      if (!detail::in_scale(upper[k])) {
        throw Error(ErrorCode::ValueOutOfScale,
                    "'" + items[i] + "' vs '" + items[j] + "' = " + std::to_string(upper[k]) +
                        " outside [1/9, 9]",
                    items[i]);
      }
    }
  }
  return PairwiseComparison(std::move(items), std::move(upper));
}

/// n x n multiplicative-reciprocal matrix with entries in [1/9, 9].
/// Stored row-major. Instances always satisfy the invariants.
class ReciprocalMatrix {
 public:
  /// Builds from the strict upper triangle (row-major); the lower triangle is
  /// mirrored as 1/x and the diagonal set to 1.
  static ReciprocalMatrix from_upper(ItemSet items, std::span<const double> upper) {
    const std::size_t n = items.size();
    if (upper.size() != upper_count(n)) {
      throw Error(ErrorCode::LengthMismatch,
                  "matrix over " + std::to_string(n) + " items needs " +
                      std::to_string(upper_count(n)) + " upper entries, got " +
                      std::to_string(upper.size()));
    }
    std::vector<double> values(n * n, 1.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        values[i * n + j] = upper[k];
        values[j * n + i] = 1.0 / upper[k];
      }
    }
    return from_dense(std::move(items), std::move(values));
  }

  /// Validates a full row-major matrix.
  static ReciprocalMatrix from_dense(ItemSet items, std::vector<double> values) {
    const std::size_t n = items.size();
    if (values.size() != n * n) {
      throw Error(ErrorCode::LengthMismatch,
                  "matrix over " + std::to_string(n) + " items needs " +
                      std::to_string(n * n) + " entries, got " + std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      double& d = values[i * n + i];
      if (std::abs(d - 1.0) > kMatrixTolerance) {
        throw Error(ErrorCode::NotReciprocal,
                    "diagonal entry of '" + items[i] + "' is " + std::to_string(d), items[i]);
      }
      d = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double a = values[i * n + j];
        const double b = values[j * n + i];
        if (!detail::in_scale(a) || !detail::in_scale(b)) {
          throw Error(ErrorCode::ValueOutOfScale,
                      "'" + items[i] + "' vs '" + items[j] + "' outside [1/9, 9]", items[i]);
        }
        if (std::abs(a * b - 1.0) > kMatrixTolerance) {
          throw Error(ErrorCode::NotReciprocal,
                      "'" + items[i] + "' vs '" + items[j] + "': " + std::to_string(a) +
                          " * " + std::to_string(b) + " != 1",
                      items[i]);
        }
      }
    }
    return ReciprocalMatrix(std::move(items), std::move(values));
  }

  /// All-ones (total indifference) matrix.
  static ReciprocalMatrix ones(ItemSet items) {
    const std::size_t n = items.size();
    return ReciprocalMatrix(std::move(items), std::vector<double>(n * n, 1.0));
  }

  std::size_t size() const noexcept { return items_.size(); }
  const ItemSet& items() const noexcept { return items_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * size(), size());
  }

  double max_entry() const { return *std::max_element(values_.begin(), values_.end()); }

  /// Strict upper triangle, row-major.
  std::vector<double> upper() const {
    std::vector<double> out;
    out.reserve(upper_count(size()));
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) out.push_back((*this)(i, j));
    return out;
  }

  /// True when m_ij * m_jk == m_ik for every triple, within `tolerance` relative.
  bool is_consistent(double tolerance = kMatrixTolerance) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (std::abs((*this)(i, j) * (*this)(j, k) / (*this)(i, k) - 1.0) > tolerance)
            return false;
    return true;
  }

  friend bool operator==(const ReciprocalMatrix&, const ReciprocalMatrix&) = default;

 private:
  ReciprocalMatrix(ItemSet items, std::vector<double> values)
      : items_(std::move(items)), values_(std::move(values)) {}

  ItemSet items_;
  std::vector<double> values_;
};

}  // namespace eif
