#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jscc/cloud.hpp"
#include "jscc/errors.hpp"
#include "jscc/mapping.hpp"
#include "jscc/stats.hpp"

namespace jscc {

namespace detail {
struct IndexVecHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
    for (std::int32_t x : v)
      h = rng::mix64(h ^ static_cast<std::uint64_t>(
                             static_cast<std::uint32_t>(x)));
    return static_cast<std::size_t>(h);
  }
};
}  // namespace detail

/// Grid census of a point cloud at one box size. Cells are keyed by their
/// integer index vector (hashed, with exact-key collision handling) and
/// carry both the raw point count and the probability mass.
struct BoxOccupancy {
  double sigma_box = 0.0;
  struct Cell {
    std::uint64_t count = 0;
    double mass = 0.0;
  };
  std::unordered_map<std::vector<std::int32_t>, Cell, detail::IndexVecHash>
      cells;
  std::uint64_t total_count = 0;
  bool uniform_masses = true;  ///< true when every point carries equal weight

  double total_mass() const {
    double s = 0;
    for (const auto& [k, c] : cells) s += c.mass;
    return s;
  }
};

/// Bins every point into the origin-anchored grid of cubes with side
/// `sigma_box` (cell index = floor(coordinate / sigma_box) per axis).
/// For uniform-weight clouds the per-cell mass is count/size exactly, so the
/// census is invariant under any permutation of the points.
inline BoxOccupancy box_census(const ModulationPointCloud& cloud,
                               double sigma_box) {
  if (!(sigma_box > 0.0))
    throw ConfigError("box_census: sigma_box must be positive");
  cloud.validate();
  BoxOccupancy occ;
  occ.sigma_box = sigma_box;
  occ.uniform_masses = cloud.uniform_weights();
  const std::size_t n = cloud.size();
  const int dim = cloud.dim;
  occ.cells.reserve(1024);

  std::vector<std::int32_t> key(static_cast<std::size_t>(dim));
  const double inv = 1.0 / sigma_box;
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = cloud.data.data() + i * static_cast<std::size_t>(dim);
    for (int j = 0; j < dim; ++j) {
      const double c = std::floor(p[j] * inv);
      if (!(c >= -2147483648.0 && c <= 2147483647.0))
        throw ConfigError("box_census: cell index overflows 32 bits");
      key[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(c);
    }
    auto it = occ.cells.find(key);
    if (it == occ.cells.end()) it = occ.cells.emplace(key, BoxOccupancy::Cell{}).first;
    it->second.count += 1;
    if (!occ.uniform_masses) it->second.mass += cloud.weights[i];
  }
  occ.total_count = n;
  if (occ.uniform_masses) {
    const double w = 1.0 / static_cast<double>(n);
    for (auto& [k, c] : occ.cells) c.mass = static_cast<double>(c.count) * w;
  }
  return occ;
}

/// N_sigma: the number of nonempty boxes.
inline std::uint64_t box_count(const BoxOccupancy& occ) {
  return occ.cells.size();
}

/// N'_{c,sigma}: the minimum number of boxes whose total mass reaches c.
/// Boxes are taken by mass, descending, ties broken by lexicographic cell
/// index so the result is reproducible. For uniform-weight clouds the
/// cumulative comparison runs on integer counts and is exact.
inline std::uint64_t effective_box_count(const BoxOccupancy& occ, double c) {
  if (!(c > 0.0 && c <= 1.0))
    throw std::domain_error("effective_box_count: need c in (0, 1]");
  std::vector<const std::pair<const std::vector<std::int32_t>,
                              BoxOccupancy::Cell>*>
      order;
  order.reserve(occ.cells.size());
  for (const auto& kv : occ.cells) order.push_back(&kv);
  std::sort(order.begin(), order.end(), [&](const auto* a, const auto* b) {
    if (occ.uniform_masses) {
      if (a->second.count != b->second.count)
        return a->second.count > b->second.count;
    } else {
      if (a->second.mass != b->second.mass)
        return a->second.mass > b->second.mass;
    }
    return a->first < b->first;
  });

  if (occ.uniform_masses) {
    const double target =
        c * static_cast<double>(occ.total_count) - 1e-9;
    double cum = 0;
    std::uint64_t taken = 0;
    for (const auto* kv : order) {
      cum += static_cast<double>(kv->second.count);
      ++taken;
      if (cum >= target) return taken;
    }
    return taken;
  }
  const double target = c - 1e-12;
  double cum = 0;
  std::uint64_t taken = 0;
  for (const auto* kv : order) {
    cum += kv->second.mass;
    ++taken;
    if (cum >= target) return taken;
  }
  return taken;
}

/// Least-squares slope of log(count) against log(1/sigma) — the finite-scale
/// proxy for the sigma -> 0 limit. Scales whose count saturates at the
/// sample size (count > n_samples/10) are excluded from the fit and
/// reported in `points_excluded`; pass n_samples = 0 to disable the guard.
inline ExponentEstimate fit_dimension(
    const std::vector<std::pair<double, std::uint64_t>>& pairs,
    std::uint64_t n_samples = 0) {
  if (pairs.size() < 3)
    throw ConfigError("fit_dimension: need at least 3 (sigma, count) pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs[i].first > 0))
      throw ConfigError("fit_dimension: sigma values must be positive");
    if (i > 0 && !(pairs[i].first < pairs[i - 1].first))
      throw ConfigError("fit_dimension: sigma values must be strictly decreasing");
    if (pairs[i].second < 1)
      throw ConfigError("fit_dimension: counts must be >= 1");
  }
  std::vector<double> x, y;
  std::vector<std::pair<double, double>> excluded;
  for (const auto& [sigma, count] : pairs) {
    const double lx = std::log(1.0 / sigma);
    const double ly = std::log(static_cast<double>(count));
    if (n_samples > 0 &&
        count > n_samples / 10) {
      excluded.emplace_back(lx, ly);
      continue;
    }
    x.push_back(lx);
    y.push_back(ly);
  }
  if (x.size() < 3)
    throw EstimationError(
        "fit_dimension: fewer than 3 usable scales after saturation guard");
  ExponentEstimate est = ols_fit(x, y);
  est.points_excluded = std::move(excluded);
  return est;
}

struct CensusRow {
  double sigma_box = 0;
  std::uint64_t n_boxes = 0;
  std::uint64_t n_effective = 0;
};

/// Raw-slope estimate for a cloud plus the per-scale census behind it.
/// `undersampled` flags scales where the sample size fell below 100 points
/// per occupied box (mass estimates noisy); such scales still enter the fit
/// unless the saturation guard removes them.
struct DimensionEstimate {
  ExponentEstimate fit;
  double beta_hat = 0.0;  ///< slope / (2n); 0 when no block length applies
  bool undersampled = false;
  std::vector<CensusRow> census;
};

inline DimensionEstimate effective_dimension_of_cloud(
    const ModulationPointCloud& cloud, double c,
    const std::vector<double>& sigma_list) {
  if (sigma_list.empty())
    throw ConfigError("effective_dimension: sigma list is empty");
  for (std::size_t i = 0; i < sigma_list.size(); ++i) {
    if (!(sigma_list[i] > 0 && sigma_list[i] < 1))
      throw ConfigError("effective_dimension: sigma values must lie in (0,1)");
    if (i > 0 && !(sigma_list[i] < sigma_list[i - 1]))
      throw ConfigError("effective_dimension: sigma list must be strictly decreasing");
  }
  DimensionEstimate out;
  std::vector<std::pair<double, std::uint64_t>> pairs;
  pairs.reserve(sigma_list.size());
  for (double sigma : sigma_list) {
    const BoxOccupancy occ = box_census(cloud, sigma);
    CensusRow row;
    row.sigma_box = sigma;
    row.n_boxes = box_count(occ);
    row.n_effective = effective_box_count(occ, c);
    out.census.push_back(row);
    pairs.emplace_back(sigma, row.n_effective);
    if (cloud.size() < 100 * row.n_boxes) out.undersampled = true;
  }
  out.fit = fit_dimension(pairs, cloud.size());
  return out;
}

/// Samples the mapping's modulation set and estimates its c-effective
/// box-counting dimension; beta_hat = raw slope / (2n).
inline DimensionEstimate effective_dimension(const MappingDescriptor& map,
                                             double c,
                                             const std::vector<double>& sigma_list,
                                             std::size_t n_samples,
                                             std::uint64_t seed) {
  const ModulationPointCloud cloud = sample_cloud(map, n_samples, seed);
  DimensionEstimate est = effective_dimension_of_cloud(cloud, c, sigma_list);
  est.beta_hat = est.fit.slope / (2.0 * map.n);
  return est;
}

}  // namespace jscc
