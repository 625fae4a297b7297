#pragma once

// Test-only oracles and random generators. The oracles evaluate the defining
// formulas directly on full matrices in long double, without going through
// any library code path.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "eif/eif.hpp"

namespace eif::test {

using Dense = std::vector<std::vector<long double>>;

/// m_ij = 9^((rank_j - rank_i) / (n - 1)), i.e. the difference of the
/// inverted, normalized substitutes, evaluated entry by entry.
inline Dense oracle_ordering(const std::vector<int>& ranks) {
  const std::size_t n = ranks.size();
  Dense m(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = std::pow(9.0L, static_cast<long double>(ranks[j] - ranks[i]) / static_cast<long double>(n - 1));
  return m;
}

/// Full ratio matrix, then every entry mapped through x^(1/log9(max)).
inline Dense oracle_rating(const std::vector<double>& u, double z, bool normalize = true) {
  const std::size_t n = u.size();
  Dense m(n, std::vector<long double>(n));
  long double max = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = std::pow(static_cast<long double>(u[i]) / u[j], static_cast<long double>(z));
      max = std::max(max, m[i][j]);
    }
  if (normalize && max > 1) {
    const long double log9_max = std::log(max) / std::log(9.0L);
    for (auto& row : m)
      for (auto& x : row) x = std::pow(x, 1.0L / log9_max);
  }
  return m;
}

/// (x_1 * ... * x_r)^(1/r), product form.
inline long double oracle_geomean(const std::vector<long double>& xs) {
  long double p = 1;
  for (auto x : xs) p *= x;
  return std::pow(p, 1.0L / xs.size());
}

/// 1/2 (1 + log9 (prod_j m_ij)^(1/n)) per row.
inline std::vector<long double> oracle_raw_impact(const Dense& m) {
  std::vector<long double> out;
  for (const auto& row : m) out.push_back(0.5L * (1 + std::log(oracle_geomean(row)) / std::log(9.0L)));
  return out;
}

inline Dense dense(const ReciprocalMatrix& m) {
  Dense d(m.size(), std::vector<long double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) d[i][j] = m(i, j);
  return d;
}

inline long double max_rel_diff(const ReciprocalMatrix& m, const Dense& expected) {
  long double worst = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - expected[i][j]) / expected[i][j]);
  return worst;
}

/// Indices sorted by descending key; equal keys keep index order.
template <typename T>
std::vector<std::size_t> descending_order(const std::vector<T>& keys) {
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return keys[a] > keys[b]; });
  return idx;
}

// ---- generators -------------------------------------------------------------

using Rng = std::mt19937_64;

inline ItemSet labels(std::size_t n, const std::string& prefix = "e") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return ItemSet(std::move(out));
}

inline std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<int> random_ranks(Rng& rng, std::size_t n) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 1);
  std::shuffle(r.begin(), r.end(), rng);
  return r;
}

/// Log-uniform utilities over several orders of magnitude.
inline std::vector<double> random_utilities(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  std::vector<double> u(n);
  for (auto& x : u) x = std::pow(10.0, e(rng));
  return u;
}

/// Integer scores 1..10, so ties are common.
inline std::vector<double> random_scores(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(1, 10);
  std::vector<double> u(n);
  for (auto& x : u) x = d(rng);
  return u;
}

inline std::vector<double> random_upper(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> e(-1.0, 1.0);
  std::vector<double> v(upper_count(n));
  for (auto& x : v) x = std::pow(9.0, e(rng));
  return v;
}

inline ReciprocalMatrix random_reciprocal(Rng& rng, const ItemSet& items) {
  return ReciprocalMatrix::from_upper(items, random_upper(rng, items.size()));
}

/// Consistent matrix m_ij = w_i / w_j built from weights spanning at most 1:9.
inline ReciprocalMatrix consistent_from_weights(const ItemSet& items, const std::vector<double>& w) {
  std::vector<double> upper;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) upper.push_back(w[i] / w[j]);
  return ReciprocalMatrix::from_upper(items, upper);
}

inline std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(1.0, 9.0);
  std::vector<double> w(n);
  for (auto& x : w) x = d(rng);
  return w;
}

/// A random but valid scenario over p phases and q roles.
inline Scenario random_scenario(Rng& rng, std::size_t p, std::size_t q) {
  Scenario s;
  s.name = "random";
  std::vector<std::string> ph, ro;
  for (std::size_t i = 0; i < p; ++i) ph.push_back("P" + std::to_string(i));
  for (std::size_t i = 0; i < q; ++i) ro.push_back("R" + std::to_string(i));
  s.views = {View("phases", ph), View("roles", ro)};
  s.phase_view = "phases";
  s.role_view = "roles";

  auto random_ccf = [&](const ItemSet& items, std::string name) -> Ccf {
    const std::size_t n = items.size();
    switch (uniform_size(rng, 0, 3)) {
      case 0: return {std::move(name), make_ordering(items, random_ranks(rng, n))};
      case 1: return {std::move(name), make_rating(items, random_utilities(rng, n))};
      case 2: return {std::move(name), make_pairwise(items, random_upper(rng, n))};
      default: return {std::move(name), random_reciprocal(rng, items)};
    }
  };

  if (p >= 2) {
    MetaComponent mc{"phase_meta", Target::Phase, {}, 1.0};
    const ItemSet items(ph);
    for (std::size_t k = uniform_size(rng, 1, 3); k-- > 0;) mc.ccfs.push_back(random_ccf(items, "c" + std::to_string(k)));
    s.metas.push_back(std::move(mc));
  }
  if (q >= 2) {
    MetaComponent mc{"role_meta", Target::Role, {}, 1.0};
    const ItemSet items(ro);
    for (std::size_t k = uniform_size(rng, 1, 3); k-- > 0;) mc.ccfs.push_back(random_ccf(items, "c" + std::to_string(k)));
    s.metas.push_back(std::move(mc));

    MetaComponent pr{"by_phase", Target::PhaseRole, {}, 1.0};
    for (const auto& phase : ph) {
      Ccf c = random_ccf(items, "o_" + phase);
      c.phase = phase;
      pr.ccfs.push_back(std::move(c));
    }
    s.metas.push_back(std::move(pr));
  }
  return s;
}

}  // namespace eif::test
