#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "jscc/exponent_lab.hpp"
#include "jscc/mapping.hpp"

using namespace jscc;

namespace {

ChannelRealization identity_channel(int n) {
  ChannelRealization hr;
  hr.h = Eigen::MatrixXcd::Identity(n, n);
  hr.singular_values_sq.assign(static_cast<std::size_t>(n), 1.0);
  return hr;
}

ChannelRealization scalar_channel(std::complex<double> h) {
  ChannelRealization hr;
  hr.h = Eigen::MatrixXcd::Constant(1, 1, h);
  hr.singular_values_sq = {std::norm(h)};
  return hr;
}

}  // namespace

TEST_CASE("scalar linear mapping centers and normalizes") {
  const auto map = MappingDescriptor::linear(1, 1, 1);
  CHECK_THAT(map.gain, Catch::Matchers::WithinAbs(std::sqrt(12.0), 1e-12));
  const double mid[] = {0.5};
  CHECK(encode(map, mid)(0, 0) == std::complex<double>(0, 0));

  rng::Engine eng{404};
  double acc = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double s[] = {eng.uniform()};
    acc += std::norm(encode(map, s)(0, 0));
  }
  CHECK_THAT(acc / n, Catch::Matchers::WithinAbs(1.0, 0.02));
}

TEST_CASE("every shipped mapping kind is power-normalized") {
  const MappingDescriptor maps[] = {
      MappingDescriptor::linear(1, 1, 1), MappingDescriptor::linear(2, 1, 2),
      MappingDescriptor::linear(4, 2, 2), MappingDescriptor::spiral(1, 1, 4.0),
      MappingDescriptor::spiral(1, 1, 8.0), MappingDescriptor::spiral(2, 2, 4.0),
      MappingDescriptor::hybrid(1, 1, 1),  MappingDescriptor::hybrid(1, 1, 2),
      MappingDescriptor::hybrid(1, 1, 3)};
  int idx = 0;
  for (const auto& map : maps) {
    INFO("mapping #" << idx++ << " kind " << to_string(map.kind));
    CHECK_THAT(measured_power(map, 200000, 7),
               Catch::Matchers::WithinAbs(1.0, 0.02));
  }
}

TEST_CASE("spiral phase structure") {
  const auto map = MappingDescriptor::spiral(1, 1, 4.0);
  const double zero[] = {0.0};
  CHECK(encode(map, zero)(0, 0) == std::complex<double>(0, 0));

  const double s0[] = {0.3};
  const double s1[] = {0.3 + 1.0 / 8.0};  // +1/(2 Lambda)
  const auto z0 = encode(map, s0)(0, 0);
  const auto z1 = encode(map, s1)(0, 0);
  double dphi = std::arg(z1) - std::arg(z0);
  while (dphi < 0) dphi += 2 * std::numbers::pi;
  CHECK_THAT(dphi, Catch::Matchers::WithinAbs(std::numbers::pi, 1e-9));

  // Radius grows strictly with the curve parameter.
  double prev = -1.0;
  for (int i = 1; i <= 100; ++i) {
    const double s[] = {i / 100.0};
    const double r = std::abs(encode(map, s)(0, 0));
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("encode rejects sources outside the unit cube") {
  const auto map = MappingDescriptor::linear(2, 1, 1);
  const double bad[] = {0.5, 1.2};
  CHECK_THROWS_AS(encode(map, bad), std::domain_error);
  const double bad2[] = {-0.1, 0.5};
  CHECK_THROWS_AS(encode(map, bad2), std::domain_error);
}

TEST_CASE("linear and spiral encoders are Lipschitz over random pairs") {
  rng::Engine eng{11};
  for (const auto& map : {MappingDescriptor::linear(2, 1, 2),
                          MappingDescriptor::spiral(1, 1, 4.0)}) {
    double max_ratio = 0;
    for (int i = 0; i < 100000; ++i) {
      std::vector<double> a(map.m), b(map.m);
      for (int j = 0; j < map.m; ++j) {
        a[j] = eng.uniform();
        b[j] = eng.uniform();
      }
      double dist = 0;
      for (int j = 0; j < map.m; ++j) dist += (a[j] - b[j]) * (a[j] - b[j]);
      dist = std::sqrt(dist);
      if (dist < 1e-9) continue;
      const double d = (encode(map, a) - encode(map, b)).norm();
      max_ratio = std::max(max_ratio, d / dist);
    }
    INFO("kind " << to_string(map.kind));
    CHECK(std::isfinite(max_ratio));
    CHECK(max_ratio < 100.0);
  }
}

TEST_CASE("grid decoder returns the exact argmin with lexicographic ties") {
  // Exhaustive optimality on random instances, for every mapping kind and
  // for the multi-dimensional candidate enumeration.
  rng::Engine eng{314};
  const struct {
    MappingDescriptor map;
    double step;
    int nr;
  } cases[] = {
      {MappingDescriptor::linear(1, 1, 1), 0.01, 1},
      {MappingDescriptor::linear(1, 2, 1), 0.02, 2},
      {MappingDescriptor::linear(2, 1, 2), 0.02, 2},
      {MappingDescriptor::spiral(1, 1, 4.0), 0.02, 1},
      {MappingDescriptor::hybrid(1, 1, 2), 0.02, 1},
  };
  for (const auto& tc : cases) {
    GridDecoder dec(tc.map, tc.step);
    REQUIRE(dec.candidate_count() <= 10000);
    SystemConfig cfg;
    cfg.nt = tc.map.nt;
    cfg.nr = tc.nr;
    cfg.master_seed = 500 + tc.nr;
    for (int trial = 0; trial < 300; ++trial) {
      const auto hr = sample_channel(cfg, trial);
      dec.prepare(hr);
      Eigen::MatrixXcd y(tc.nr, tc.map.n);
      for (int r = 0; r < tc.nr; ++r)
        for (int c = 0; c < tc.map.n; ++c)
          y(r, c) = 3.0 * eng.cnormal();
      const std::size_t best = dec.argmin_exhaustive(y);
      const Eigen::VectorXd s = dec.decode(y);
      // The returned estimate achieves the global residual minimum.
      std::vector<double> sv(s.data(), s.data() + s.size());
      const auto x = encode(tc.map, sv);
      const double returned_res = (y - hr.h * x).squaredNorm();
      const double best_res = dec.residual(best, y);
      CHECK(returned_res <= best_res + 1e-12);
    }
  }
}

TEST_CASE("fast linear path agrees with the exhaustive scan exactly") {
  const auto map = MappingDescriptor::linear(1, 1, 1);
  GridDecoder dec(map, 0.01);
  SystemConfig cfg;
  cfg.nt = cfg.nr = 1;
  cfg.master_seed = 808;
  rng::Engine eng{606};
  for (int trial = 0; trial < 2000; ++trial) {
    const auto hr = sample_channel(cfg, trial);
    dec.prepare(hr);
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::MatrixXcd y(1, 1);
      y(0, 0) = hr.h(0, 0) * (4.0 * (eng.uniform() - 0.5)) + 0.3 * eng.cnormal();
      const std::size_t ex = dec.argmin_exhaustive(y);
      const Eigen::VectorXd s = dec.decode(y);
      CHECK(s(0) == dec.grid_value(ex));
    }
  }
}

TEST_CASE("exact residual ties break toward the smaller source") {
  // A zero channel projects every candidate to the origin, so all residuals
  // are exactly equal and the smallest lexicographic source must win.
  const auto map1 = MappingDescriptor::linear(1, 1, 1);
  GridDecoder dec1(map1, 0.1);
  dec1.prepare(scalar_channel({0.0, 0.0}));
  Eigen::MatrixXcd y(1, 1);
  y(0, 0) = std::complex<double>(0.7, -0.4);
  REQUIRE(dec1.residual(0, y) == dec1.residual(5, y));
  CHECK(dec1.decode(y)(0) == 0.0);

  const auto map2 = MappingDescriptor::linear(2, 1, 1);
  GridDecoder dec2(map2, 0.1);
  dec2.prepare(scalar_channel({0.0, 0.0}));
  const Eigen::VectorXd s = dec2.decode(y);
  CHECK(s(0) == 0.0);
  CHECK(s(1) == 0.0);
}

TEST_CASE("noiseless decode recovers grid sources exactly") {
  for (const auto& map :
       {MappingDescriptor::linear(1, 1, 1), MappingDescriptor::spiral(1, 1, 4.0),
        MappingDescriptor::hybrid(1, 1, 2)}) {
    GridDecoder dec(map, 0.01);
    dec.prepare(identity_channel(1));
    for (std::size_t k : {std::size_t{0}, std::size_t{17}, std::size_t{55},
                          dec.grid_size() - 1}) {
      const double s[] = {dec.grid_value(k)};
      Eigen::MatrixXcd y = encode(map, s);
      const Eigen::VectorXd est = dec.decode(y);
      INFO("kind " << to_string(map.kind) << " k " << k);
      CHECK(est(0) == s[0]);
    }
  }
}

TEST_CASE("hybrid decode recovers cell and residual without noise") {
  const auto map = MappingDescriptor::hybrid(1, 1, 2);
  GridDecoder dec(map, 0.005);
  dec.prepare(identity_channel(1));
  rng::Engine eng{33};
  for (int i = 0; i < 500; ++i) {
    const double s[] = {eng.uniform()};
    const Eigen::VectorXd est = dec.decode(encode(map, s));
    CHECK(std::abs(est(0) - s[0]) <= 0.005 + 1e-12);
  }
}

TEST_CASE("noiseless grid distortion scales like the grid step squared") {
  const auto map = MappingDescriptor::linear(1, 1, 1);
  const auto hr = identity_channel(1);
  const NoiseScale noise = NoiseScale::from_snr(1e12, 1);
  for (double step : {0.02, 0.01, 0.005}) {
    const auto est = conditional_distortion(map, {DecoderKind::GridMl, step},
                                            hr, noise, 400, 1, 99);
    INFO("step " << step);
    CHECK(est.d_hat <= step * step / 3.0);
  }
}

TEST_CASE("grid decoder rejects oversized candidate sets") {
  CHECK_THROWS_AS(GridDecoder(MappingDescriptor::linear(4, 2, 2), 0.01),
                  ConfigError);
  CHECK_NOTHROW(GridDecoder(MappingDescriptor::linear(2, 1, 1), 0.001));
  CHECK_THROWS_AS((DecoderSpec{DecoderKind::GridMl, 0.0}.validate()),
                  ConfigError);
  CHECK_THROWS_AS((DecoderSpec{DecoderKind::GridMl, 0.2}.validate()),
                  ConfigError);
}

TEST_CASE("mmse decoder applies only to linear mappings") {
  const auto spiral = MappingDescriptor::spiral(1, 1, 4.0);
  CHECK_THROWS_AS(MmseDecoder(spiral, identity_channel(1),
                              NoiseScale::from_snr(100, 1)),
                  ConfigError);
}

TEST_CASE("scalar mmse matches the posterior-variance formula") {
  const auto map = MappingDescriptor::linear(1, 1, 1);
  const auto hr = scalar_channel({1.0, 0.0});
  const NoiseScale noise = NoiseScale::from_snr(100.0, 1);
  const auto est = conditional_distortion(map, {DecoderKind::LinearMmse, 0.01},
                                          hr, noise, 50000, 2, 4);
  // Posterior variance (12 + 2 g^2/sigma^2)^-1 with g^2 = 12, sigma^2 = 0.01.
  const double expected = 1.0 / (12.0 + 2.0 * 12.0 / noise.sigma_sq);
  CHECK_THAT(est.d_hat, Catch::Matchers::WithinRel(expected, 0.05));
}

TEST_CASE("SISO decode distortion matches the scalar integral oracle") {
  // Oracle: E_h[min(1/12, sigma^2/(g^2 |h|^2))] with |h|^2 ~ Exp(1),
  // by 1-D quadrature (exact head piece + Simpson tail).
  const double sigma_sq = 0.01;  // snr = 100, nt = 1
  const double g_sq = 12.0;
  const double t_star = 12.0 * sigma_sq / g_sq;
  double oracle = (1.0 - std::exp(-t_star)) / 12.0;
  const double t_end = 50.0;
  const int steps = 2000000;
  const double h_step = (t_end - t_star) / steps;
  double simpson = 0;
  auto f = [&](double t) { return sigma_sq / (g_sq * t) * std::exp(-t); };
  for (int i = 0; i <= steps; ++i) {
    const double t = t_star + i * h_step;
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * f(t);
  }
  oracle += simpson * h_step / 3.0;
  // Cross-check the quadrature against an independently computed reference.
  CHECK_THAT(oracle, Catch::Matchers::WithinRel(0.004194121834684428, 1e-6));

  const auto map = MappingDescriptor::linear(1, 1, 1);
  SystemConfig cfg;
  cfg.nt = cfg.nr = 1;
  cfg.master_seed = 2718;
  const NoiseScale noise = NoiseScale::from_snr(100.0, 1);
  GridDecoder dec(map, default_grid_step(100.0));
  rng::Engine eng{1414};
  double acc = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto hr = sample_channel(cfg, i);
    dec.prepare(hr);
    const double s[] = {eng.uniform()};
    const auto y =
        transmit(hr, encode(map, s), noise, rng::substream(99, rng::Stream::Noise, i));
    const double err = dec.decode(y)(0) - s[0];
    acc += err * err;
  }
  const double simulated = acc / n;
  CHECK(simulated <= 2.0 * oracle);
  CHECK(simulated >= 0.5 * oracle);
}

TEST_CASE("sampled linear cloud is a straight segment") {
  const auto map = MappingDescriptor::linear(1, 1, 1);
  const auto cloud = sample_cloud(map, 10000, 5);
  cloud.validate();
  REQUIRE(cloud.dim == 2);
  REQUIRE(cloud.size() == 10000);
  CHECK(cloud.uniform_weights());
  double wsum = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) wsum += cloud.weight(i);
  CHECK_THAT(wsum, Catch::Matchers::WithinAbs(1.0, 1e-9));

  // Principal components: one nonzero variance direction.
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    mean += Eigen::Vector2d(p[0], p[1]);
  }
  mean /= double(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    const Eigen::Vector2d d = Eigen::Vector2d(p[0], p[1]) - mean;
    cov += d * d.transpose();
  }
  cov /= double(cloud.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  CHECK(eig.eigenvalues()(0) < 1e-12);
  CHECK(eig.eigenvalues()(1) > 0.01);

  CHECK_THROWS_AS(sample_cloud(map, 999, 5), ConfigError);
}

TEST_CASE("gaussian source option stays inside the cube") {
  rng::Engine eng{21};
  double out[3];
  double mean = 0, var = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    draw_source(eng, SourceKind::Gaussian, 3, out);
    for (double v : out) REQUIRE((v >= 0.0 && v <= 1.0));
    mean += out[0];
    var += (out[0] - 0.5) * (out[0] - 0.5);
  }
  CHECK_THAT(mean / n, Catch::Matchers::WithinAbs(0.5, 0.01));
  // Rejection into [0,1] truncates at +-1.73 sd, shrinking the variance to
  // about 0.664 of the nominal 1/12.
  CHECK_THAT(var / n, Catch::Matchers::WithinAbs(0.664 / 12.0, 0.003));
}
