#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "jscc/channel.hpp"
#include "jscc/errors.hpp"
#include "jscc/mapping.hpp"
#include "jscc/parallel.hpp"
#include "jscc/rng.hpp"
#include "jscc/stats.hpp"

namespace jscc {

/// Monte-Carlo estimate of the conditional distortion D(H) for one channel.
struct DistortionEstimate {
  double d_hat = 0.0;       ///< mean squared error of the source block
  int n_src = 0;
  int n_noise = 0;
  double std_error = 0.0;
};

/// One (snr, f) operating point of the fidelity event
/// { H : D(H) > threshold(f, snr) }.
struct FidelityEventRecord {
  double snr = 0.0;
  double f = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t n_channels = 0;
  std::uint64_t n_events = 0;
  /// Fraction of channel draws whose inner-estimate confidence band
  /// (d_hat +- 2 std errors) straddles the event threshold.
  double straddle_fraction = 0.0;
};

/// Event threshold at fidelity exponent f. The block distortion is compared
/// against the per-sample source variance (1/12) summed over the block, so
/// the f = 0 event remains meaningful ("worse than sending nothing") and m
/// does not shift exponents.
inline double fidelity_threshold(int m, double snr, double f) {
  return (static_cast<double>(m) / 12.0) * std::pow(snr, -f);
}

/// Averages ||x_s - x_hat||^2 over n_src source draws times n_noise noise
/// draws for the fixed channel `hr`. The seed identifies the draw; source
/// and noise streams are derived from it, so the same seed reproduces the
/// same estimate regardless of the caller's schedule.
/// `shared_grid` lets callers reuse one candidate table across draws.
inline DistortionEstimate conditional_distortion(
    const MappingDescriptor& map, const DecoderSpec& dec,
    const ChannelRealization& hr, const NoiseScale& noise, int n_src,
    int n_noise, std::uint64_t seed, GridDecoder* shared_grid = nullptr) {
  dec.validate();
  if (n_src < 1 || n_noise < 1 ||
      static_cast<long long>(n_src) * n_noise < 100)
    throw ConfigError(
        "conditional_distortion: need n_src * n_noise >= 100 samples");

  std::optional<GridDecoder> grid_storage;
  std::optional<MmseDecoder> mmse;
  GridDecoder* grid = nullptr;
  if (dec.kind == DecoderKind::GridMl) {
    grid = shared_grid;
    if (!grid) {
      grid_storage.emplace(map, dec.grid_step);
      grid = &*grid_storage;
    }
    grid->prepare(hr);
  } else {
    mmse.emplace(map, hr, noise);
  }

  rng::Engine src_eng{rng::substream(seed, rng::Stream::Source, 0)};
  rng::Engine noise_eng{rng::substream(seed, rng::Stream::Noise, 0)};
  const double noise_sd = std::sqrt(noise.sigma_sq);

  std::vector<double> s(static_cast<std::size_t>(map.m));
  std::vector<std::complex<double>> slots(
      static_cast<std::size_t>(map.slots()));
  Eigen::MatrixXcd y(hr.h.rows(), map.n);

  double acc = 0.0;
  double acc_sq = 0.0;
  const std::size_t total =
      static_cast<std::size_t>(n_src) * static_cast<std::size_t>(n_noise);
  for (int i = 0; i < n_src; ++i) {
    draw_source(src_eng, SourceKind::Uniform, map.m, s.data());
    detail::encode_slots(map, s, slots.data());
    // y0 = h * X once per source block
    Eigen::MatrixXcd x(map.nt, map.n);
    for (int r = 0; r < map.nt; ++r)
      for (int c = 0; c < map.n; ++c)
        x(r, c) = slots[static_cast<std::size_t>(r * map.n + c)];
    const Eigen::MatrixXcd y0 = hr.h * x;
    for (int j = 0; j < n_noise; ++j) {
      for (Eigen::Index a = 0; a < y.rows(); ++a)
        for (Eigen::Index c = 0; c < y.cols(); ++c)
          y(a, c) = y0(a, c) + noise_sd * noise_eng.cnormal();
      const Eigen::VectorXd est = mmse ? mmse->decode(y) : grid->decode(y);
      double err = 0;
      for (int k = 0; k < map.m; ++k) {
        const double d = s[static_cast<std::size_t>(k)] - est(k);
        err += d * d;
      }
      acc += err;
      acc_sq += err * err;
    }
  }
  DistortionEstimate out;
  out.n_src = n_src;
  out.n_noise = n_noise;
  out.d_hat = acc / static_cast<double>(total);
  const double var =
      std::max(0.0, acc_sq / static_cast<double>(total) - out.d_hat * out.d_hat);
  out.std_error = std::sqrt(var / static_cast<double>(total));
  return out;
}

/// Conditional-distortion estimates for n_channels independent draws at one
/// SNR, ordered by draw index. This is the shared kernel behind the event
/// estimators: computing D(H) once per draw lets every fidelity exponent be
/// thresholded against the same draws (common random numbers).
inline std::vector<DistortionEstimate> distortion_profile(
    const MappingDescriptor& map, const DecoderSpec& dec,
    const SystemConfig& cfg, double snr, std::uint64_t n_channels, int n_src,
    int n_noise, int threads = 1) {
  dec.validate();
  const NoiseScale noise = NoiseScale::from_snr(snr, cfg.nt);
  std::vector<DistortionEstimate> profile(n_channels);
  parallel_chunks(n_channels, threads, [&](std::size_t lo, std::size_t hi) {
    // One candidate table per worker, re-projected per channel draw.
    std::optional<GridDecoder> grid;
    if (dec.kind == DecoderKind::GridMl) grid.emplace(map, dec.grid_step);
    for (std::size_t d = lo; d < hi; ++d) {
      const ChannelRealization hr = sample_channel(cfg, d);
      const std::uint64_t seed =
          rng::substream(cfg.master_seed, rng::Stream::Distortion, d);
      profile[d] = conditional_distortion(map, dec, hr, noise, n_src, n_noise,
                                          seed, grid ? &*grid : nullptr);
    }
  });
  return profile;
}

/// Thresholds a distortion profile at fidelity exponent f.
inline FidelityEventRecord threshold_profile(
    const std::vector<DistortionEstimate>& profile, int m, double snr,
    double f) {
  const double t = fidelity_threshold(m, snr, f);
  std::uint64_t events = 0, straddles = 0;
  for (const auto& de : profile) {
    if (de.d_hat > t) ++events;
    if (std::abs(de.d_hat - t) <= 2.0 * de.std_error) ++straddles;
  }
  FidelityEventRecord rec;
  rec.snr = snr;
  rec.f = f;
  rec.n_channels = profile.size();
  rec.n_events = events;
  rec.p_hat = static_cast<double>(events) / static_cast<double>(profile.size());
  const BinomialInterval ci = clopper_pearson(events, profile.size());
  rec.ci_low = ci.low;
  rec.ci_high = ci.high;
  rec.straddle_fraction =
      static_cast<double>(straddles) / static_cast<double>(profile.size());
  return rec;
}

/// P{ D(H) > snr^-f (m/12) } over independent channel draws, with the exact
/// binomial interval. Zero events is a valid outcome (p_hat = 0 with an
/// informative upper bound), not an error.
inline FidelityEventRecord fidelity_event_probability(
    const MappingDescriptor& map, const DecoderSpec& dec,
    const SystemConfig& cfg, double snr, double f, std::uint64_t n_channels,
    int n_src, int n_noise, int threads = 1) {
  if (n_channels < 1000)
    throw ConfigError("fidelity_event_probability: need n_channels >= 1000");
  if (!(f >= 0.0))
    throw ConfigError("fidelity_event_probability: need f >= 0");
  const auto profile =
      distortion_profile(map, dec, cfg, snr, n_channels, n_src, n_noise, threads);
  return threshold_profile(profile, map.m, snr, f);
}

/// Diversity estimate at one fidelity exponent plus the records behind it.
struct DiversityEstimate {
  double f = 0.0;
  ExponentEstimate fit;
  std::vector<FidelityEventRecord> records;   ///< one per SNR point
  std::vector<double> excluded_snrs;          ///< zero-event points left out
  bool undetectable = false;
};

namespace detail {

inline DiversityEstimate fit_diversity(
    std::vector<FidelityEventRecord> records, double f) {
  DiversityEstimate est;
  est.f = f;
  std::vector<double> x, y, w;
  for (const auto& r : records) {
    if (r.n_events == 0) {
      est.excluded_snrs.push_back(r.snr);
      continue;
    }
    // Var(-log p_hat) ~ (1 - p)/(n p) by the delta method.
    const double p = r.p_hat;
    const double n = static_cast<double>(r.n_channels);
    x.push_back(std::log(r.snr));
    y.push_back(-std::log(p));
    if (p >= 1.0) {
      // Saturated probability: variance formally 0; use the one-event scale.
      w.push_back(n);
    } else {
      w.push_back(n * p / (1.0 - p));
    }
  }
  est.records = std::move(records);
  if (x.size() < 3) {
    est.undetectable = true;
    return est;
  }
  est.fit = wls_fit(x, y, w);
  return est;
}

}  // namespace detail

/// Slope of -log p_hat against log snr at fixed f: the finite-SNR diversity
/// estimate. SNR points with zero events are excluded and reported; fewer
/// than 3 usable points marks the estimate undetectable at this scale.
inline DiversityEstimate diversity_estimate(
    const MappingDescriptor& map, const DecoderSpec& dec,
    const SystemConfig& cfg, double f, const std::vector<double>& snr_grid,
    std::uint64_t n_channels, int n_src, int n_noise, int threads = 1) {
  std::vector<FidelityEventRecord> records;
  records.reserve(snr_grid.size());
  for (double snr : snr_grid) {
    const auto profile = distortion_profile(map, dec, cfg, snr, n_channels,
                                            n_src, n_noise, threads);
    records.push_back(threshold_profile(profile, map.m, snr, f));
  }
  return detail::fit_diversity(std::move(records), f);
}

/// Full diversity-fidelity sweep. Distortion profiles are computed once per
/// SNR and shared across every f (common random numbers), which also makes
/// p_hat exactly non-decreasing in f on the shared draws.
struct SweepResult {
  std::vector<DiversityEstimate> per_f;
  /// Largest f whose fitted slope is significantly positive
  /// (slope > 2 standard errors); negative infinity when none is.
  double max_significant_f = -std::numeric_limits<double>::infinity();
};

inline SweepResult fidelity_sweep(const MappingDescriptor& map,
                                  const DecoderSpec& dec,
                                  const SystemConfig& cfg,
                                  const std::vector<double>& f_grid,
                                  const std::vector<double>& snr_grid,
                                  std::uint64_t n_channels, int n_src,
                                  int n_noise, int threads = 1) {
  for (std::size_t i = 1; i < f_grid.size(); ++i)
    if (!(f_grid[i] > f_grid[i - 1]))
      throw ConfigError("fidelity_sweep: f grid must be ascending");
  std::vector<std::vector<DistortionEstimate>> profiles;
  profiles.reserve(snr_grid.size());
  for (double snr : snr_grid)
    profiles.push_back(distortion_profile(map, dec, cfg, snr, n_channels,
                                          n_src, n_noise, threads));
  SweepResult sweep;
  for (double f : f_grid) {
    std::vector<FidelityEventRecord> records;
    records.reserve(snr_grid.size());
    for (std::size_t i = 0; i < snr_grid.size(); ++i)
      records.push_back(threshold_profile(profiles[i], map.m, snr_grid[i], f));
    DiversityEstimate est = detail::fit_diversity(std::move(records), f);
    if (!est.undetectable &&
        est.fit.slope > 2.0 * est.fit.stderr_slope &&
        f > sweep.max_significant_f)
      sweep.max_significant_f = f;
    sweep.per_f.push_back(std::move(est));
  }
  return sweep;
}

}  // namespace jscc
