#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eif/error.hpp"
#include "eif/preference.hpp"

namespace eif {

/// Combines r positive reals into one.
///
/// Implementations must be reciprocity-compatible (op(1/x...) == 1/op(x...)),
/// idempotent, and bounded by min/max of their inputs. aggregate() relies on
/// the first property: it evaluates the upper triangle only and mirrors it.
class AggregationOperator {
 public:
  virtual ~AggregationOperator() = default;
  virtual double combine(std::span<const double> values) const = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// Unweighted geometric mean, evaluated in the log domain.
class GeometricMean final : public AggregationOperator {
 public:
  double combine(std::span<const double> values) const override {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "geometric mean of nothing");
    double log_sum = 0.0;
    for (double v : values) log_sum += std::log(v);
    return std::exp(log_sum / static_cast<double>(values.size()));
  }
  std::string_view name() const noexcept override { return "geometric_mean"; }
};

/// Looks up an operator by the name used in scenario files.
inline std::shared_ptr<const AggregationOperator> make_operator(std::string_view name) {
  if (name == "geometric_mean") return std::make_shared<GeometricMean>();
  throw Error(ErrorCode::UnknownOperator, "unknown aggregation operator '" + std::string(name) + "'",
              std::string(name));
}

/// Entrywise combination of matrices over one ItemSet into a collective matrix.
inline ReciprocalMatrix aggregate(std::span<const ReciprocalMatrix> matrices,
                                  const AggregationOperator& op) {
  if (matrices.empty()) throw Error(ErrorCode::EmptyInput, "no matrices to aggregate");
  const ItemSet& items = matrices.front().items();
  for (const auto& m : matrices.subspan(1)) require_same_items(items, m.items());

  const std::size_t n = items.size();
  std::vector<double> column(matrices.size());
  std::vector<double> upper;
  upper.reserve(upper_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < matrices.size(); ++k) column[k] = matrices[k](i, j);
      upper.push_back(op.combine(column));
    }
  }
  return ReciprocalMatrix::from_upper(items, upper);
}

inline ReciprocalMatrix aggregate(std::span<const ReciprocalMatrix> matrices) {
  return aggregate(matrices, GeometricMean{});
}

}  // namespace eif
