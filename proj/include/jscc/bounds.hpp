#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "jscc/channel.hpp"
#include "jscc/errors.hpp"

namespace jscc {

/// Exact arithmetic for curve anchors and bound formulas. Grids built from
/// decimal strings stay rational end to end; only irrational inputs fall
/// back to floating point.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

inline Rational eta_of(const SystemConfig& cfg) {
  return Rational(cfg.n, cfg.m);
}

/// Parses "3", "-2", "3/4" or a decimal like "0.25" exactly.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ConfigError("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const long long num = std::stoll(text.substr(0, slash));
    const long long den = std::stoll(text.substr(slash + 1));
    if (den == 0) throw ConfigError("rational literal with zero denominator");
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  const std::string ip = text.substr(0, dot);
  const std::string fp = text.substr(dot + 1);
  if (fp.size() > 15) throw ConfigError("decimal literal too long: " + text);
  long long den = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
  const bool neg = !ip.empty() && ip[0] == '-';
  const long long ipart = ip.empty() || ip == "-" ? 0 : std::stoll(ip);
  const long long fpart = fp.empty() ? 0 : std::stoll(fp);
  Rational r = Rational(std::abs(ipart)) + Rational(fpart, den);
  return neg ? -r : r;
}

/// Effective-dimension hypothesis for the Theorem-1 bound:
/// the c-effective dimension lies in [2 n beta, 2 n beta'].
struct DimensionHypothesis {
  double beta = 1.0;
  double beta_prime = 1.0;

  void validate(int nt) const {
    if (!(beta > 0.0 && beta <= beta_prime && beta_prime <= nt))
      throw ConfigError(
          "DimensionHypothesis: need 0 < beta <= beta_prime <= nt");
  }
};

struct CurvePoint {
  double f = 0.0;
  double d = 0.0;
  bool interpolated = false;
};

/// One diversity-fidelity curve, fidelity ascending, diversity
/// non-increasing. `interpolation_flag` marks curves containing points
/// that are interpolations between the formula's anchor values.
struct TradeoffCurve {
  std::string label;
  std::vector<CurvePoint> points;
  bool interpolation_flag = false;
};

// ---------------------------------------------------------------------------
// Optimal tradeoff
// ---------------------------------------------------------------------------

/// d*(f) = (nt - f/2eta)(nr - f/2eta) at integer values of f/(2 eta);
/// piecewise-linear between those anchors, with `interpolated` set.
inline Rational optimal_diversity(int nt, int nr, const Rational& eta,
                                  const Rational& f,
                                  bool* interpolated = nullptr) {
  if (nr < nt) throw ConfigError("optimal_diversity: requires nr >= nt");
  if (interpolated) *interpolated = false;
  const Rational k = f / (2 * eta);
  if (k < 0 || k > nt)
    throw std::domain_error("optimal_diversity: f outside [0, 2 eta nt]");
  if (k.denominator() == 1) {
    const long long ki = k.numerator();
    return Rational((nt - ki) * (nr - ki));
  }
  const long long k0 = k.numerator() / k.denominator();  // floor for k >= 0
  const long long k1 = k0 + 1;
  const Rational d0((nt - k0) * (nr - k0));
  const Rational d1((nt - k1) * (nr - k1));
  if (interpolated) *interpolated = true;
  return d0 + (d1 - d0) * (k - k0);
}

inline double optimal_diversity(const SystemConfig& cfg, double f,
                                bool* interpolated = nullptr) {
  cfg.require_nr_ge_nt();
  const double eta = cfg.eta();
  const double k = f / (2.0 * eta);
  if (interpolated) *interpolated = false;
  if (!(k >= 0.0 && k <= cfg.nt))
    throw std::domain_error("optimal_diversity: f outside [0, 2 eta nt]");
  const double kr = std::round(k);
  if (std::abs(k - kr) < 1e-12) {
    return (cfg.nt - kr) * (cfg.nr - kr);
  }
  const double k0 = std::floor(k);
  const double d0 = (cfg.nt - k0) * (cfg.nr - k0);
  const double d1 = (cfg.nt - k0 - 1) * (cfg.nr - k0 - 1);
  if (interpolated) *interpolated = true;
  return d0 + (d1 - d0) * (k - k0);
}

// ---------------------------------------------------------------------------
// Theorem 1 / Eq. (7) bounds
// ---------------------------------------------------------------------------

/// d(f) <= (nr - beta + 1)(nt - beta + 1)(1 - f / (2 eta beta')),
/// asserted for 0 <= f <= 2 eta beta'.
inline Rational thm1_upper(int nt, int nr, const Rational& eta,
                           const Rational& beta, const Rational& beta_prime,
                           const Rational& f) {
  if (nr < nt) throw ConfigError("thm1_upper: requires nr >= nt");
  if (!(beta > 0 && beta <= beta_prime && beta_prime <= nt))
    throw ConfigError("thm1_upper: need 0 < beta <= beta_prime <= nt");
  const Rational fmax = 2 * eta * beta_prime;
  if (f < 0 || f > fmax)
    throw std::domain_error("thm1_upper: f outside [0, 2 eta beta']");
  return (Rational(nr) - beta + 1) * (Rational(nt) - beta + 1) *
         (Rational(1) - f / fmax);
}

inline double thm1_upper(const SystemConfig& cfg,
                         const DimensionHypothesis& hyp, double f) {
  cfg.require_nr_ge_nt();
  hyp.validate(cfg.nt);
  const double fmax = 2.0 * cfg.eta() * hyp.beta_prime;
  if (!(f >= 0.0 && f <= fmax + 1e-12))
    throw std::domain_error("thm1_upper: f outside [0, 2 eta beta']");
  return (cfg.nr - hyp.beta + 1) * (cfg.nt - hyp.beta + 1) *
         (1.0 - f / fmax);
}

/// d(0) <= (nt - beta + 1)(nr - beta + 1).
inline double d0_upper(const SystemConfig& cfg, double beta) {
  cfg.require_nr_ge_nt();
  if (!(beta > 0.0 && beta <= cfg.nt))
    throw std::domain_error("d0_upper: need 0 < beta <= nt");
  return (cfg.nt - beta + 1) * (cfg.nr - beta + 1);
}

/// Theorem 2: no fidelity exponent above 2 eta beta.
inline double thm2_fidelity_ceiling(double eta, double beta) {
  if (!(eta > 0.0 && beta > 0.0))
    throw ConfigError("thm2_fidelity_ceiling: eta and beta must be positive");
  return 2.0 * eta * beta;
}

/// SNR exponent of the eigenvalue-collapse probability,
/// (nt - beta + 1)(nr - beta + 1); cross-checks eigen_tail_probability.
inline double eigen_outage_exponent(const SystemConfig& cfg, double beta) {
  const double k = cfg.nt - beta + 1;
  if (!(k >= 1.0 && k <= std::min(cfg.nt, cfg.nr)))
    throw std::domain_error(
        "eigen_outage_exponent: need 1 <= nt - beta + 1 <= min(nt, nr)");
  return k * (cfg.nr - beta + 1);
}

// ---------------------------------------------------------------------------
// Curve emission
// ---------------------------------------------------------------------------

inline std::vector<Rational> rational_grid(const Rational& from,
                                           const Rational& to,
                                           const Rational& step) {
  if (!(step > 0)) throw ConfigError("rational_grid: step must be positive");
  std::vector<Rational> out;
  for (Rational f = from; f <= to; f += step) out.push_back(f);
  return out;
}

/// The Figure-1 family: the optimal curve plus one Theorem-1 curve per beta
/// (with beta' = beta), sampled on a uniform f-grid of the given step.
/// Configurations other than 4x4 antennas with eta = 3/2 are labelled
/// "generalized".
inline std::vector<TradeoffCurve> figure1_curves(
    const SystemConfig& cfg, const std::vector<Rational>& beta_list,
    const Rational& f_step = Rational(1, 4)) {
  cfg.require_nr_ge_nt();
  const Rational eta = eta_of(cfg);
  const bool canonical =
      cfg.nt == 4 && cfg.nr == 4 && eta == Rational(3, 2);
  const std::string prefix = canonical ? "" : "generalized_";

  std::vector<TradeoffCurve> curves;
  {
    TradeoffCurve curve;
    curve.label = prefix + "optimal";
    const Rational f_end = 2 * eta * cfg.nt;
    for (const Rational& f : rational_grid(Rational(0), f_end, f_step)) {
      bool interp = false;
      const Rational d = optimal_diversity(cfg.nt, cfg.nr, eta, f, &interp);
      curve.points.push_back({to_double(f), to_double(d), interp});
      curve.interpolation_flag = curve.interpolation_flag || interp;
    }
    curves.push_back(std::move(curve));
  }
  for (const Rational& beta : beta_list) {
    TradeoffCurve curve;
    curve.label = prefix + "thm1_beta_" +
                  std::to_string(beta.numerator()) +
                  (beta.denominator() == 1
                       ? std::string()
                       : "_" + std::to_string(beta.denominator()));
    const Rational f_end = 2 * eta * beta;
    for (const Rational& f : rational_grid(Rational(0), f_end, f_step))
      curve.points.push_back(
          {to_double(f),
           to_double(thm1_upper(cfg.nt, cfg.nr, eta, beta, beta, f)), false});
    curves.push_back(std::move(curve));
  }
  return curves;
}

struct CorollaryGap {
  Rational gap;
  Rational f_at_min;
  Rational beta_at_min;
};

/// Minimum of d*(f) - bound(f) over an interior f-grid; a positive gap
/// certifies numerically that no single mapping with these dimension
/// parameters reaches the optimal curve away from the extreme points.
///
/// The certificate evaluates the bound's level factor at the eigenvalue
/// exponent's provable domain: the collapse event behind Theorem 1 involves
/// nt - beta + 1 of the min(nt, nr) channel eigenvalues, so for beta below
/// nt - min(nt, nr) + 1 the level saturates at the all-eigenvalues value
/// rather than exceeding nt * nr.
inline CorollaryGap corollary_gap(const SystemConfig& cfg,
                                  const Rational& beta,
                                  const Rational& beta_prime,
                                  const std::vector<Rational>& f_grid) {
  cfg.require_nr_ge_nt();
  const Rational eta = eta_of(cfg);
  if (!(beta > 0 && beta <= beta_prime && beta_prime <= cfg.nt))
    throw ConfigError("corollary_gap: need 0 < beta <= beta_prime <= nt");
  const Rational f_sup =
      std::min(2 * eta * beta_prime, 2 * eta * Rational(cfg.nt));
  if (f_grid.empty()) throw ConfigError("corollary_gap: empty f grid");
  const Rational beta_level =
      std::max(beta, Rational(cfg.nt - std::min(cfg.nt, cfg.nr) + 1));
  const Rational level = (Rational(cfg.nr) - beta_level + 1) *
                         (Rational(cfg.nt) - beta_level + 1);
  std::optional<CorollaryGap> best;
  for (const Rational& f : f_grid) {
    if (!(f > 0 && f < f_sup))
      throw ConfigError("corollary_gap: f grid must lie strictly inside "
                        "(0, min(2 eta beta', 2 eta nt))");
    const Rational d_star = optimal_diversity(cfg.nt, cfg.nr, eta, f);
    const Rational bound = level * (Rational(1) - f / (2 * eta * beta_prime));
    const Rational gap = d_star - bound;
    if (!best || gap < best->gap) best = CorollaryGap{gap, f, beta};
  }
  return *best;
}

}  // namespace jscc
