#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "jscc/errors.hpp"
#include "jscc/rng.hpp"
#include "jscc/stats.hpp"

namespace jscc {

/// System-level parameters shared by every experiment: antenna counts,
/// block geometry, the SNR grid (linear scale) and the master seed.
/// The expansion factor eta = n/m is kept as the exact integer pair (m, n).
struct SystemConfig {
  int nt = 1;          ///< transmit antennas
  int nr = 1;          ///< receive antennas
  int m = 1;           ///< source samples per block
  int n = 1;           ///< channel uses per block
  std::vector<double> snr_grid;
  std::uint64_t master_seed = 0;

  double eta() const { return static_cast<double>(n) / static_cast<double>(m); }

  void validate() const {
    if (nt < 1 || nr < 1 || m < 1 || n < 1)
      throw ConfigError("SystemConfig: nt, nr, m, n must all be >= 1");
    for (std::size_t i = 0; i < snr_grid.size(); ++i) {
      if (!(snr_grid[i] > 1.0))
        throw ConfigError("SystemConfig: snr values must be > 1");
      if (i > 0 && !(snr_grid[i] > snr_grid[i - 1]))
        throw ConfigError("SystemConfig: snr_grid must be strictly increasing");
    }
  }

  /// Bound-related formulas additionally assume nr >= nt.
  void require_nr_ge_nt() const {
    if (nr < nt)
      throw ConfigError("operation requires nr >= nt");
  }
};

/// Noise scaling for one SNR operating point. sigma_sq is the variance of
/// each complex noise entry, nt/snr, so that with unit-power transmit
/// entries the per-receive-antenna SNR equals the nominal value.
struct NoiseScale {
  double snr = 1.0;
  double sigma_sq = 1.0;

  static NoiseScale from_snr(double snr, int nt) {
    if (!(snr > 0)) throw ConfigError("NoiseScale: snr must be positive");
    return NoiseScale{snr, static_cast<double>(nt) / snr};
  }
};

/// One quasi-static fading draw: the matrix itself plus its cached squared
/// singular values, ascending (lambda_1 <= ... <= lambda_min(nt,nr)).
struct ChannelRealization {
  Eigen::MatrixXcd h;
  std::vector<double> singular_values_sq;
  std::uint64_t draw_index = 0;
};

/// Draws the channel matrix for `draw_index`: i.i.d. CN(0,1) entries,
/// a pure function of (cfg.master_seed, draw_index). Entries are generated
/// row-major so the layout is part of the reproducibility contract.
inline ChannelRealization sample_channel(const SystemConfig& cfg,
                                         std::uint64_t draw_index) {
  rng::Engine eng = rng::engine_for(cfg.master_seed, rng::Stream::Channel,
                                    draw_index);
  ChannelRealization hr;
  hr.draw_index = draw_index;
  hr.h.resize(cfg.nr, cfg.nt);
  for (int r = 0; r < cfg.nr; ++r)
    for (int c = 0; c < cfg.nt; ++c) hr.h(r, c) = eng.cnormal();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hr.h);
  const auto& sv = svd.singularValues();
  hr.singular_values_sq.resize(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    hr.singular_values_sq[static_cast<std::size_t>(sv.size() - 1 - i)] =
        sv(i) * sv(i);  // Eigen returns descending; store ascending
  return hr;
}

/// y = h x + sqrt(nt/snr) w with w i.i.d. CN(0,1) seeded by `noise_seed`.
inline Eigen::MatrixXcd transmit(const ChannelRealization& hr,
                                 const Eigen::MatrixXcd& x,
                                 const NoiseScale& noise,
                                 std::uint64_t noise_seed) {
  if (x.rows() != hr.h.cols())
    throw ConfigError("transmit: x row count must equal nt");
  if (!(noise.sigma_sq > 0))
    throw ConfigError("transmit: noise variance must be positive");
  rng::Engine eng{noise_seed};
  const double scale = std::sqrt(noise.sigma_sq);
  Eigen::MatrixXcd y = hr.h * x;
  for (Eigen::Index r = 0; r < y.rows(); ++r)
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      y(r, c) += scale * eng.cnormal();
  return y;
}

/// Exponent a degenerate eigenvalue is reported as, together with a flag.
constexpr double kDegenerateExponent = 1e6;
constexpr double kDegenerateLambda = 1e-300;

struct EigenExponents {
  std::vector<double> alpha;  ///< same ascending-lambda order (alpha descending)
  bool degenerate = false;    ///< true if any lambda fell below 1e-300
};

/// alpha_i = log(lambda_i) / log(sigma_ref), the collapse depth of each
/// channel eigenvalue relative to a reference scale sigma_ref in (0, 1).
inline EigenExponents eigen_exponents(const ChannelRealization& hr,
                                      double sigma_ref) {
  if (!(sigma_ref > 0.0 && sigma_ref < 1.0))
    throw std::domain_error("eigen_exponents: sigma_ref must lie in (0,1)");
  const double denom = std::log(sigma_ref);
  EigenExponents out;
  out.alpha.reserve(hr.singular_values_sq.size());
  for (double lam : hr.singular_values_sq) {
    if (lam <= kDegenerateLambda) {
      out.alpha.push_back(kDegenerateExponent);
      out.degenerate = true;
    } else {
      out.alpha.push_back(std::log(lam) / denom);
    }
  }
  return out;
}

struct TailPoint {
  double snr = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t successes = 0;
  std::uint64_t n_draws = 0;
};

struct TailResult {
  std::vector<TailPoint> points;
  /// True when no event fired at any SNR: the exponent is not resolvable
  /// at this scale (not an error).
  bool undetectable = false;
};

/// Empirical probability that the k smallest channel eigenvalues all
/// collapse to the noise scale. The event at SNR s is
///   lambda_i <= nt/s  for the k smallest eigenvalues,
/// i.e. the eigenvalue exponents reach 1 when evaluated at the
/// noise-variance reference (sigma_ref^2 with sigma_ref = sqrt(nt/snr)).
/// A fixed reference may be supplied instead via `sigma_ref_override`,
/// in which case the threshold is sigma_ref_override^2 at every SNR.
/// Channel draws are shared across the SNR grid.
inline TailResult eigen_tail_probability(
    const SystemConfig& cfg, int k, const std::vector<double>& snr_grid,
    std::uint64_t n_draws,
    std::optional<double> sigma_ref_override = std::nullopt) {
  const int nmin = std::min(cfg.nt, cfg.nr);
  if (k < 1 || k > nmin)
    throw ConfigError("eigen_tail_probability: need 1 <= k <= min(nt,nr)");
  if (n_draws < 1000)
    throw ConfigError("eigen_tail_probability: need n_draws >= 1000");

  std::vector<double> thresholds(snr_grid.size());
  for (std::size_t i = 0; i < snr_grid.size(); ++i) {
    if (!(snr_grid[i] > 1.0))
      throw ConfigError("eigen_tail_probability: snr values must be > 1");
    const double sref = sigma_ref_override
                            ? *sigma_ref_override
                            : std::sqrt(cfg.nt / snr_grid[i]);
    thresholds[i] = sref * sref;
  }

  std::vector<std::uint64_t> hits(snr_grid.size(), 0);
  for (std::uint64_t d = 0; d < n_draws; ++d) {
    const ChannelRealization hr = sample_channel(cfg, d);
    // lambda_(k) <= t implies all smaller eigenvalues are <= t as well.
    const double lam_k = hr.singular_values_sq[static_cast<std::size_t>(k - 1)];
    for (std::size_t i = 0; i < snr_grid.size(); ++i)
      if (lam_k <= thresholds[i]) ++hits[i];
  }

  TailResult res;
  res.undetectable = true;
  res.points.reserve(snr_grid.size());
  for (std::size_t i = 0; i < snr_grid.size(); ++i) {
    TailPoint p;
    p.snr = snr_grid[i];
    p.successes = hits[i];
    p.n_draws = n_draws;
    p.p_hat = static_cast<double>(hits[i]) / static_cast<double>(n_draws);
    const BinomialInterval ci = clopper_pearson(hits[i], n_draws);
    p.ci_low = ci.low;
    p.ci_high = ci.high;
    if (hits[i] > 0) res.undetectable = false;
    res.points.push_back(p);
  }
  return res;
}

/// Weighted slope of -log p_hat against log snr over the tail points.
/// Zero-event points are excluded and reported; fewer than 3 usable points
/// raises EstimationError ("undetectable at this scale").
inline ExponentEstimate fit_tail_slope(const TailResult& tail) {
  std::vector<double> x, y, w;
  std::vector<std::pair<double, double>> excluded;
  for (const TailPoint& p : tail.points) {
    if (p.successes == 0) {
      excluded.emplace_back(std::log(p.snr), 0.0);
      continue;
    }
    x.push_back(std::log(p.snr));
    y.push_back(-std::log(p.p_hat));
    w.push_back(p.p_hat < 1.0
                    ? static_cast<double>(p.n_draws) * p.p_hat / (1.0 - p.p_hat)
                    : static_cast<double>(p.n_draws));
  }
  if (x.size() < 3)
    throw EstimationError(
        "eigen tail: exponent undetectable at this scale (needs >= 3 SNR "
        "points with events)");
  ExponentEstimate est = wls_fit(x, y, w);
  est.points_excluded = std::move(excluded);
  return est;
}

}  // namespace jscc
