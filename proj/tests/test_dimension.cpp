#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "jscc/dimension.hpp"

using namespace jscc;

namespace {

std::vector<double> pow2_sigmas(int lo, int hi) {
  std::vector<double> s;
  for (int k = lo; k <= hi; ++k) s.push_back(std::pow(2.0, -k));
  return s;
}

/// Independent prefix-count oracle: sort masses descending (count order is
/// irrelevant for the prefix length) and count until the target is covered.
std::uint64_t effective_count_oracle(const BoxOccupancy& occ, double c) {
  std::vector<double> masses;
  for (const auto& [k, cell] : occ.cells) masses.push_back(cell.mass);
  std::sort(masses.begin(), masses.end(), std::greater<>());
  double cum = 0;
  std::uint64_t taken = 0;
  for (double m : masses) {
    cum += m;
    ++taken;
    if (cum >= c - 1e-9) break;
  }
  return taken;
}

}  // namespace

TEST_CASE("census of a single point occupies one cell of mass 1") {
  ModulationPointCloud cloud;
  cloud.dim = 3;
  cloud.data = {0.0, 0.0, 0.0};
  for (double sigma : {0.1, 0.25, 1.0}) {
    const auto occ = box_census(cloud, sigma);
    CHECK(box_count(occ) == 1);
    CHECK_THAT(occ.cells.begin()->second.mass,
               Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("segment census count matches the exact cell count") {
  const auto cloud = make_segment_cloud(1000000, 2, 42);
  const auto occ = box_census(cloud, std::pow(2.0, -8));
  const auto count = box_count(occ);
  CHECK(count >= 250);
  CHECK(count <= 260);
  double mass = 0;
  std::uint64_t points = 0;
  for (const auto& [k, cell] : occ.cells) {
    mass += cell.mass;
    points += cell.count;
  }
  CHECK_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK(points == cloud.size());
}

TEST_CASE("square census occupancy at 2^-5") {
  const auto cloud = make_square_cloud(1000000, 2, 43);
  const auto occ = box_census(cloud, std::pow(2.0, -5));
  CHECK_THAT(double(box_count(occ)), Catch::Matchers::WithinRel(1024.0, 0.02));
}

TEST_CASE("box count is invariant under coordinate permutation") {
  const auto cloud = make_segment_cloud(20000, 2, 44);
  ModulationPointCloud swapped = cloud;
  for (std::size_t i = 0; i < swapped.size(); ++i)
    std::swap(swapped.data[2 * i], swapped.data[2 * i + 1]);
  for (double sigma : pow2_sigmas(3, 6))
    CHECK(box_count(box_census(cloud, sigma)) ==
          box_count(box_census(swapped, sigma)));
}

TEST_CASE("shuffling the points changes no count") {
  auto cloud = make_mixture_cloud(50000, 2, 0.95, 45);
  auto shuffled = cloud;
  std::mt19937_64 gen(7);
  // Shuffle points (rows) of the flat buffer.
  std::vector<std::size_t> perm(shuffled.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  ModulationPointCloud out;
  out.dim = cloud.dim;
  out.data.resize(cloud.data.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (int j = 0; j < cloud.dim; ++j)
      out.data[i * 2 + j] = cloud.data[perm[i] * 2 + j];

  for (double sigma : pow2_sigmas(2, 8)) {
    const auto a = box_census(cloud, sigma);
    const auto b = box_census(out, sigma);
    REQUIRE(box_count(a) == box_count(b));
    for (double c : {0.25, 0.5, 0.9, 0.99, 1.0})
      CHECK(effective_box_count(a, c) == effective_box_count(b, c));
  }
}

TEST_CASE("effective count equals the box count at c = 1") {
  const auto cloud = make_square_cloud(20000, 2, 46);
  for (double sigma : pow2_sigmas(2, 5)) {
    const auto occ = box_census(cloud, sigma);
    CHECK(effective_box_count(occ, 1.0) == box_count(occ));
  }
}

TEST_CASE("a dominant atom collapses the effective count at c below its mass") {
  // Explicit-weight mixture: one atom of mass 0.95 plus a uniform segment.
  ModulationPointCloud cloud;
  cloud.dim = 2;
  const int k = 2000;
  cloud.data.reserve(2 * (k + 1));
  cloud.weights.reserve(k + 1);
  cloud.data.insert(cloud.data.end(), {0.5, 0.0});
  cloud.weights.push_back(0.95);
  for (int i = 0; i < k; ++i) {
    cloud.data.insert(cloud.data.end(), {(i + 0.5) / k, 0.0});
    cloud.weights.push_back(0.05 / k);
  }
  cloud.validate();
  for (double sigma : pow2_sigmas(2, 8)) {
    const auto occ = box_census(cloud, sigma);
    CHECK(effective_box_count(occ, 0.9) == 1);
    CHECK(effective_box_count(occ, 0.9) == effective_count_oracle(occ, 0.9));
  }
}

TEST_CASE("sampled mixture: slope 0 at c = 0.9 and ~1 at c = 0.99") {
  const auto cloud = make_mixture_cloud(1000000, 2, 0.95, 47);
  const auto sigmas = pow2_sigmas(4, 11);

  const auto est_low = effective_dimension_of_cloud(cloud, 0.9, sigmas);
  CHECK_THAT(est_low.fit.slope, Catch::Matchers::WithinAbs(0.0, 0.05));

  std::vector<std::pair<double, std::uint64_t>> oracle_pairs;
  const auto est_high = effective_dimension_of_cloud(cloud, 0.99, sigmas);
  for (double sigma : sigmas) {
    const auto occ = box_census(cloud, sigma);
    oracle_pairs.emplace_back(sigma, effective_count_oracle(occ, 0.99));
  }
  // Module counts agree with the brute-force prefix oracle at every sigma.
  for (std::size_t i = 0; i < sigmas.size(); ++i)
    CHECK(est_high.census[i].n_effective == oracle_pairs[i].second);
  CHECK_THAT(est_high.fit.slope, Catch::Matchers::WithinAbs(1.0, 0.1));
}

TEST_CASE("fit_dimension reproduces exact power laws") {
  std::vector<std::pair<double, std::uint64_t>> pairs;
  for (int k = 4; k <= 12; ++k)
    pairs.emplace_back(std::pow(2.0, -k), std::uint64_t(1) << k);
  auto est = fit_dimension(pairs);
  CHECK_THAT(est.slope, Catch::Matchers::WithinAbs(1.0, 1e-12));

  pairs.clear();
  for (int k = 4; k <= 12; ++k)
    pairs.emplace_back(std::pow(2.0, -k), std::uint64_t(1) << (2 * k));
  est = fit_dimension(pairs);
  CHECK_THAT(est.slope, Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("fit_dimension input validation and saturation guard") {
  CHECK_THROWS_AS(fit_dimension({{0.5, 10}, {0.25, 20}}), ConfigError);
  CHECK_THROWS_AS(fit_dimension({{0.25, 10}, {0.5, 20}, {0.125, 30}}),
                  ConfigError);
  CHECK_THROWS_AS(fit_dimension({{0.5, 10}, {0.25, 0}, {0.125, 30}}),
                  ConfigError);
  // Saturated scales are excluded and reported; too few left -> error.
  std::vector<std::pair<double, std::uint64_t>> pairs = {
      {0.5, 2}, {0.25, 4}, {0.125, 8}, {0.0625, 5000}, {0.03125, 9000}};
  const auto est = fit_dimension(pairs, 10000);
  CHECK(est.points_used.size() == 3);
  CHECK(est.points_excluded.size() == 2);
  CHECK_THAT(est.slope, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK_THROWS_AS(fit_dimension({{0.5, 2000}, {0.25, 4000}, {0.125, 8000}},
                                10000),
                  EstimationError);
}

TEST_CASE("spiral modulation set has dimension 1") {
  const auto map = MappingDescriptor::spiral(1, 1, 4.0);
  const auto est =
      effective_dimension(map, 0.9, pow2_sigmas(4, 11), 1000000, 48);
  CHECK_THAT(est.fit.slope, Catch::Matchers::WithinAbs(1.0, 0.15));
  CHECK_THAT(est.beta_hat, Catch::Matchers::WithinAbs(0.5, 0.075));
}

TEST_CASE("linear scalar mapping has dimension 1 and beta 1/2") {
  const auto map = MappingDescriptor::linear(1, 1, 1);
  const auto est =
      effective_dimension(map, 0.9, pow2_sigmas(4, 11), 200000, 49);
  CHECK_THAT(est.fit.slope, Catch::Matchers::WithinAbs(1.0, 0.1));
  CHECK_THAT(est.beta_hat, Catch::Matchers::WithinAbs(0.5, 0.05));
}

TEST_CASE("hybrid mapping stays one-dimensional at small scales") {
  const auto map = MappingDescriptor::hybrid(1, 1, 3);
  const auto est =
      effective_dimension(map, 0.9, pow2_sigmas(5, 11), 400000, 50);
  CHECK_THAT(est.fit.slope, Catch::Matchers::WithinAbs(1.0, 0.15));
}

TEST_CASE("full-dimensional synthetic set recovers the ambient dimension") {
  const auto cloud = make_cube_cloud(1000000, 4, 51);
  const auto est = effective_dimension_of_cloud(cloud, 0.9, pow2_sigmas(1, 4));
  CHECK_THAT(est.fit.slope, Catch::Matchers::WithinAbs(4.0, 0.1));
}

TEST_CASE("effective count is monotone in c and below the box count") {
  const auto cloud = make_cube_cloud(10000, 2, 52);
  rng::Engine eng{53};
  for (double sigma : pow2_sigmas(2, 5)) {
    const auto occ = box_census(cloud, sigma);
    const auto n_total = box_count(occ);
    for (int rep = 0; rep < 20; ++rep) {
      double a = 0.05 + 0.9 * eng.uniform();
      double b = 0.05 + 0.9 * eng.uniform();
      if (a > b) std::swap(a, b);
      CHECK(effective_box_count(occ, a) <= effective_box_count(occ, b));
      CHECK(effective_box_count(occ, b) <= n_total);
    }
  }
}

TEST_CASE("halving the box size never decreases the box count") {
  const auto cloud = make_square_cloud(100000, 2, 54);
  std::uint64_t prev = 0;
  for (double sigma : pow2_sigmas(1, 8)) {
    const auto count = box_count(box_census(cloud, sigma));
    CHECK(count >= prev);
    prev = count;
  }
}

TEST_CASE("undersampled scales are flagged") {
  // 64 occupied boxes from 2000 samples is ~31 per box, under the
  // 100-samples-per-box guard but clear of the saturation cutoff.
  const auto cloud = make_square_cloud(2000, 2, 55);
  const auto est = effective_dimension_of_cloud(cloud, 0.9, pow2_sigmas(1, 3));
  CHECK(est.undersampled);
  const auto big = make_square_cloud(100000, 2, 55);
  const auto est_big =
      effective_dimension_of_cloud(big, 0.9, pow2_sigmas(1, 3));
  CHECK_FALSE(est_big.undersampled);
}

TEST_CASE("census and effective-count argument validation") {
  const auto cloud = make_segment_cloud(1000, 2, 56);
  CHECK_THROWS_AS(box_census(cloud, 0.0), ConfigError);
  const auto occ = box_census(cloud, 0.25);
  CHECK_THROWS_AS(effective_box_count(occ, 0.0), std::domain_error);
  CHECK_THROWS_AS(effective_box_count(occ, 1.5), std::domain_error);
  CHECK_THROWS_AS(
      effective_dimension_of_cloud(cloud, 0.9, {0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(effective_dimension_of_cloud(cloud, 0.9, {}), ConfigError);
}
