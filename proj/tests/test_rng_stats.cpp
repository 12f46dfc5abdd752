#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "jscc/rng.hpp"
#include "jscc/stats.hpp"

using namespace jscc;

TEST_CASE("substream is a pure function of its inputs") {
  const auto a = rng::substream(42, rng::Stream::Channel, 7);
  const auto b = rng::substream(42, rng::Stream::Channel, 7);
  CHECK(a == b);
  CHECK(a != rng::substream(42, rng::Stream::Channel, 8));
  CHECK(a != rng::substream(42, rng::Stream::Noise, 7));
  CHECK(a != rng::substream(43, rng::Stream::Channel, 7));
}

TEST_CASE("substreams do not collide over a draw range") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t d = 0; d < 100000; ++d)
    seen.insert(rng::substream(123, rng::Stream::Channel, d));
  CHECK(seen.size() == 100000);
}

TEST_CASE("engine draws are reproducible and well-scaled") {
  rng::Engine a{99}, b{99};
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
  rng::Engine e{5};
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = e.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK_THAT(s / n, Catch::Matchers::WithinAbs(0.5, 0.005));
  CHECK_THAT(s2 / n - 0.25, Catch::Matchers::WithinAbs(1.0 / 12.0, 0.005));

  double cs = 0;
  for (int i = 0; i < n; ++i) cs += std::norm(e.cnormal());
  CHECK_THAT(cs / n, Catch::Matchers::WithinAbs(1.0, 0.02));
}

TEST_CASE("clopper_pearson matches an independent beta-quantile oracle") {
  // Frozen values from the beta-quantile form of the exact interval.
  auto ci = clopper_pearson(5, 10);
  CHECK_THAT(ci.low, Catch::Matchers::WithinAbs(0.18708602844739855, 1e-9));
  CHECK_THAT(ci.high, Catch::Matchers::WithinAbs(0.8129139715526015, 1e-9));

  ci = clopper_pearson(0, 100);
  CHECK(ci.low == 0.0);
  CHECK_THAT(ci.high, Catch::Matchers::WithinAbs(0.03621669264517641, 1e-9));

  ci = clopper_pearson(100, 100);
  CHECK_THAT(ci.low, Catch::Matchers::WithinAbs(0.9637833073548235, 1e-9));
  CHECK(ci.high == 1.0);

  ci = clopper_pearson(3, 1000);
  CHECK_THAT(ci.low, Catch::Matchers::WithinAbs(0.0006190999316495715, 1e-9));
  CHECK_THAT(ci.high, Catch::Matchers::WithinAbs(0.008742023238478303, 1e-9));

  ci = clopper_pearson(250, 1000);
  CHECK_THAT(ci.low, Catch::Matchers::WithinAbs(0.22343040626468022, 1e-9));
  CHECK_THAT(ci.high, Catch::Matchers::WithinAbs(0.2780500062237557, 1e-9));

  CHECK_THROWS_AS(clopper_pearson(1, 0), EstimationError);
  CHECK_THROWS_AS(clopper_pearson(5, 4), EstimationError);
}

TEST_CASE("ols recovers exact lines") {
  std::vector<double> x, y;
  for (int k = 0; k <= 8; ++k) {
    x.push_back(k);
    y.push_back(3.5 * k - 2.0);
  }
  const auto est = ols_fit(x, y);
  CHECK_THAT(est.slope, Catch::Matchers::WithinAbs(3.5, 1e-12));
  CHECK_THAT(est.intercept, Catch::Matchers::WithinAbs(-2.0, 1e-12));
  CHECK_THAT(est.stderr_slope, Catch::Matchers::WithinAbs(0.0, 1e-9));
  CHECK(est.points_used.size() == 9);
}

TEST_CASE("wls weights dominate the fit") {
  // Two tight points define slope 1; a third, far-off point carries almost
  // no weight and must barely move the estimate.
  std::vector<double> x = {0.0, 1.0, 2.0};
  std::vector<double> y = {0.0, 1.0, 10.0};
  std::vector<double> w = {1e8, 1e8, 1e-8};
  const auto est = wls_fit(x, y, w);
  CHECK_THAT(est.slope, Catch::Matchers::WithinAbs(1.0, 1e-3));
  CHECK(est.stderr_slope > 0.0);
  CHECK_THROWS_AS(wls_fit(x, y, {1.0, -1.0, 1.0}), EstimationError);
  CHECK_THROWS_AS(ols_fit({1.0, 2.0}, {1.0, 2.0}), EstimationError);
}
