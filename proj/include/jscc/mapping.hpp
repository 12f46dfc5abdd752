#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jscc/channel.hpp"
#include "jscc/cloud.hpp"
#include "jscc/errors.hpp"
#include "jscc/rng.hpp"

namespace jscc {

enum class MappingKind { Linear, Spiral, HybridDigitalAnalog };

inline std::string to_string(MappingKind k) {
  switch (k) {
    case MappingKind::Linear: return "linear";
    case MappingKind::Spiral: return "spiral";
    case MappingKind::HybridDigitalAnalog: return "hybrid";
  }
  return "?";
}

/// A concrete analog source-channel map from [0,1]^m to complex nt x n
/// space-time matrices, power-normalized so E ||X||_F^2 / (n nt) = 1 under
/// the uniform source.
///
/// Layout convention (shared with cloud flattening): complex slot q = r*n + c
/// for antenna row r and channel use c; real dimensions 2q (Re) and 2q+1 (Im).
///
/// * linear  — source sample j rides real dimension (j mod 2 n nt); with
///   m <= 2 n nt each sample owns one dimension. gain = sqrt(12 n nt / m).
/// * spiral  — m = 1; z(s) = theta e^{i theta}, theta = 2 pi stretch s,
///   repeated on every slot with equal amplitude. gain = sqrt(3)/(2 pi
///   stretch) / sqrt(n nt) per slot, so the single-slot case is
///   X = sqrt(3)/(2 pi stretch) * theta e^{i theta}.
/// * hybrid — m = 1; the b most significant bits of s select a point of a
///   2^b rectangular QAM constellation, the residual rides the real axis at
///   relative amplitude 2 * 2^{-b}; the whole set is renormalized.
struct MappingDescriptor {
  MappingKind kind = MappingKind::Linear;
  int m = 1;
  int n = 1;
  int nt = 1;
  double spiral_stretch = 0.0;  ///< spiral winding count (Lambda)
  int hybrid_bits = 0;          ///< digital bits per sample (b)
  double gain = 0.0;            ///< power-normalization scalar

  int slots() const { return n * nt; }
  int ambient_dim() const { return 2 * n * nt; }
  /// Real dimension of the image manifold (a curve/segment union for m=1).
  int nominal_dimension() const { return m; }

  static MappingDescriptor linear(int m, int n, int nt) {
    if (m < 1 || n < 1 || nt < 1)
      throw ConfigError("linear mapping: dimensions must be >= 1");
    MappingDescriptor d;
    d.kind = MappingKind::Linear;
    d.m = m;
    d.n = n;
    d.nt = nt;
    d.gain = std::sqrt(12.0 * n * nt / m);
    return d;
  }

  static MappingDescriptor spiral(int n, int nt, double stretch) {
    if (!(stretch > 0)) throw ConfigError("spiral mapping: stretch must be > 0");
    if (n < 1 || nt < 1)
      throw ConfigError("spiral mapping: dimensions must be >= 1");
    MappingDescriptor d;
    d.kind = MappingKind::Spiral;
    d.m = 1;
    d.n = n;
    d.nt = nt;
    d.spiral_stretch = stretch;
    const double theta_max = 2.0 * std::numbers::pi * stretch;
    // E|z|^2 = theta_max^2 / 3 over uniform s; each slot repeats z at unit
    // average power.
    d.gain = std::sqrt(3.0) / theta_max;
    return d;
  }

  static MappingDescriptor hybrid(int n, int nt, int bits) {
    if (bits < 1) throw ConfigError("hybrid mapping: bits must be >= 1");
    if (bits > 20) throw ConfigError("hybrid mapping: bits too large");
    if (n < 1 || nt < 1)
      throw ConfigError("hybrid mapping: dimensions must be >= 1");
    MappingDescriptor d;
    d.kind = MappingKind::HybridDigitalAnalog;
    d.m = 1;
    d.n = n;
    d.nt = nt;
    d.hybrid_bits = bits;
    // Mean constellation power plus residual-segment power, computed exactly.
    const int levels_i = 1 << ((bits + 1) / 2);
    const int levels_q = 1 << (bits / 2);
    double p_const = 0.0;
    for (int u = 0; u < (1 << bits); ++u) {
      const double ci = 2.0 * (u % levels_i) - (levels_i - 1);
      const double cq = 2.0 * (u / levels_i) - (levels_q - 1);
      p_const += ci * ci + cq * cq;
    }
    p_const /= double(1 << bits);
    const double res_amp = 2.0 * std::pow(2.0, -bits);
    const double p_res = res_amp * res_amp / 12.0;
    d.gain = 1.0 / std::sqrt(p_const + p_res);
    return d;
  }
};

namespace detail {

/// Hybrid constellation point for digital index u (before gain).
inline std::complex<double> hybrid_point(int u, int bits) {
  const int levels_i = 1 << ((bits + 1) / 2);
  const int levels_q = 1 << (bits / 2);
  const double ci = 2.0 * (u % levels_i) - (levels_i - 1);
  const double cq = 2.0 * (u / levels_i) - (levels_q - 1);
  return {ci, cq};
}

/// Encodes into `slots` (length n*nt, slot order q = r*n + c).
inline void encode_slots(const MappingDescriptor& map,
                         std::span<const double> s,
                         std::complex<double>* slots) {
  const int ns = map.slots();
  switch (map.kind) {
    case MappingKind::Linear: {
      const int dims = map.ambient_dim();
      std::fill(slots, slots + ns, std::complex<double>(0, 0));
      for (int j = 0; j < map.m; ++j) {
        const int rd = j % dims;
        const double v = map.gain * (s[static_cast<std::size_t>(j)] - 0.5);
        if (rd % 2 == 0)
          slots[rd / 2] += std::complex<double>(v, 0);
        else
          slots[rd / 2] += std::complex<double>(0, v);
      }
      break;
    }
    case MappingKind::Spiral: {
      const double theta =
          2.0 * std::numbers::pi * map.spiral_stretch * s[0];
      const std::complex<double> z =
          map.gain * theta * std::complex<double>(std::cos(theta), std::sin(theta));
      std::fill(slots, slots + ns, z);
      break;
    }
    case MappingKind::HybridDigitalAnalog: {
      const int cells = 1 << map.hybrid_bits;
      const double scaled = s[0] * cells;
      int u = std::min(static_cast<int>(scaled), cells - 1);
      const double r = scaled - u;
      const double res_amp = 2.0 * std::pow(2.0, -map.hybrid_bits);
      const std::complex<double> z =
          map.gain * (hybrid_point(u, map.hybrid_bits) +
                      std::complex<double>(res_amp * (r - 0.5), 0.0));
      std::fill(slots, slots + ns, z);
      break;
    }
  }
}

inline void check_source(const MappingDescriptor& map,
                         std::span<const double> s) {
  if (static_cast<int>(s.size()) != map.m)
    throw ConfigError("encode: source vector length must equal m");
  for (double v : s)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("encode: source samples must lie in [0,1]");
}

}  // namespace detail

/// Deterministic encode of a source block to the nt x n space-time matrix.
inline Eigen::MatrixXcd encode(const MappingDescriptor& map,
                               std::span<const double> s) {
  detail::check_source(map, s);
  std::vector<std::complex<double>> slots(
      static_cast<std::size_t>(map.slots()));
  detail::encode_slots(map, s, slots.data());
  Eigen::MatrixXcd x(map.nt, map.n);
  for (int r = 0; r < map.nt; ++r)
    for (int c = 0; c < map.n; ++c)
      x(r, c) = slots[static_cast<std::size_t>(r * map.n + c)];
  return x;
}

/// Flattens a slot vector to interleaved real coordinates (2q, 2q+1).
inline void flatten_slots(const std::complex<double>* slots, int n_slots,
                          double* out) {
  for (int q = 0; q < n_slots; ++q) {
    out[2 * q] = slots[q].real();
    out[2 * q + 1] = slots[q].imag();
  }
}

/// The affine basis of a linear mapping: B_j = d encode / d s_j as an
/// nt x n complex matrix.
inline Eigen::MatrixXcd linear_basis(const MappingDescriptor& map, int j) {
  if (map.kind != MappingKind::Linear)
    throw ConfigError("linear_basis: mapping is not linear");
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(map.nt, map.n);
  const int rd = j % map.ambient_dim();
  const int q = rd / 2;
  const std::complex<double> unit =
      (rd % 2 == 0) ? std::complex<double>(map.gain, 0)
                    : std::complex<double>(0, map.gain);
  b(q / map.n, q % map.n) = unit;
  return b;
}

// ---------------------------------------------------------------------------
// Decoders
// ---------------------------------------------------------------------------

enum class DecoderKind { GridMl, LinearMmse };

inline std::string to_string(DecoderKind k) {
  return k == DecoderKind::GridMl ? "grid_ml" : "linear_mmse";
}

/// Default grid resolution tied to the operating SNR.
inline double default_grid_step(double snr) {
  return std::min(1e-3, 1.0 / snr);
}

struct DecoderSpec {
  DecoderKind kind = DecoderKind::GridMl;
  double grid_step = 1e-3;

  void validate() const {
    if (kind == DecoderKind::GridMl &&
        !(grid_step > 0.0 && grid_step <= 0.1))
      throw ConfigError("DecoderSpec: grid_step must lie in (0, 0.1]");
  }
};

constexpr double kMaxGridCandidates = 1e7;

/// Grid-search approximate ML decoder. Candidate source vectors are the
/// lattice {0, step, 2 step, ..., 1}^m; the decoder returns the candidate
/// minimizing ||y - h encode(s)||_F, ties broken toward the smaller
/// lexicographic source vector (the enumeration order).
///
/// Construction encodes every candidate once; prepare() projects them
/// through a channel realization so that many receive blocks can be decoded
/// against the same channel cheaply. For linear mappings with m = 1 the
/// projected candidates lie on a line and the argmin is found by locating
/// the least-squares vertex and scanning a small window around it with the
/// exact same residual arithmetic as the exhaustive path.
class GridDecoder {
 public:
  GridDecoder(const MappingDescriptor& map, double grid_step)
      : map_(map), step_(grid_step) {
    DecoderSpec{DecoderKind::GridMl, grid_step}.validate();
    grid_.push_back(0.0);
    for (int k = 1;; ++k) {
      const double v = k * grid_step;
      if (v >= 1.0 - 1e-12) break;
      grid_.push_back(v);
    }
    grid_.push_back(1.0);
    const double total = std::pow(double(grid_.size()), map.m);
    if (total > kMaxGridCandidates)
      throw ConfigError("grid decoder: more than 1e7 candidates; use a "
                        "coarser grid or a smaller m");
    n_cand_ = static_cast<std::size_t>(total + 0.5);

    const std::size_t ns = static_cast<std::size_t>(map.slots());
    cand_src_.resize(n_cand_ * static_cast<std::size_t>(map.m));
    cand_slots_.resize(n_cand_ * ns);
    std::vector<int> idx(static_cast<std::size_t>(map.m), 0);
    std::vector<double> s(static_cast<std::size_t>(map.m));
    for (std::size_t c = 0; c < n_cand_; ++c) {
      for (int j = 0; j < map.m; ++j)
        s[static_cast<std::size_t>(j)] = grid_[static_cast<std::size_t>(
            idx[static_cast<std::size_t>(j)])];
      std::copy(s.begin(), s.end(),
                cand_src_.begin() + c * static_cast<std::size_t>(map.m));
      detail::encode_slots(map_, s, cand_slots_.data() + c * ns);
      // odometer: last coordinate fastest => enumeration is lexicographic
      for (int j = map.m - 1; j >= 0; --j) {
        if (++idx[static_cast<std::size_t>(j)] <
            static_cast<int>(grid_.size()))
          break;
        idx[static_cast<std::size_t>(j)] = 0;
      }
    }
    fast_linear_ = (map.kind == MappingKind::Linear && map.m == 1);
  }

  std::size_t candidate_count() const { return n_cand_; }

  /// Projects all candidates through the channel of `hr`.
  void prepare(const ChannelRealization& hr) {
    const int ns = map_.slots();
    const std::size_t ne = static_cast<std::size_t>(hr.h.rows() * map_.n);
    proj_.assign(n_cand_ * ne, {0.0, 0.0});
    Eigen::MatrixXcd x(map_.nt, map_.n);
    for (std::size_t c = 0; c < n_cand_; ++c) {
      const std::complex<double>* slots =
          cand_slots_.data() + c * static_cast<std::size_t>(ns);
      for (int r = 0; r < map_.nt; ++r)
        for (int col = 0; col < map_.n; ++col)
          x(r, col) = slots[static_cast<std::size_t>(r * map_.n + col)];
      Eigen::MatrixXcd p = hr.h * x;
      std::complex<double>* out = proj_.data() + c * ne;
      for (Eigen::Index a = 0; a < p.rows(); ++a)
        for (Eigen::Index col = 0; col < p.cols(); ++col)
          out[static_cast<std::size_t>(a * p.cols() + col)] = p(a, col);
    }
    n_entries_ = ne;
    if (fast_linear_) {
      // Projected candidates: proj_c = A * v_c with v = gain * (grid - 1/2).
      Eigen::MatrixXcd a = hr.h * linear_basis(map_, 0);
      fast_a_.assign(ne, {0.0, 0.0});
      double a2 = 0;
      for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index col = 0; col < a.cols(); ++col) {
          const std::complex<double> e = a(r, col);
          fast_a_[static_cast<std::size_t>(r * a.cols() + col)] = e;
          a2 += std::norm(e);
        }
      fast_a2_ = a2;
    }
  }

  /// Decodes one received block against the prepared channel.
  Eigen::VectorXd decode(const Eigen::MatrixXcd& y) const {
    if (static_cast<std::size_t>(y.size()) != n_entries_)
      throw ConfigError("grid decode: received block has wrong shape");
    std::size_t best;
    if (fast_linear_ && fast_a2_ > 0.0) {
      best = decode_fast(y);
    } else {
      best = 0;
      double best_res = residual(0, y);
      for (std::size_t c = 1; c < n_cand_; ++c) {
        const double r = residual(c, y);
        if (r < best_res) {
          best_res = r;
          best = c;
        }
      }
    }
    Eigen::VectorXd s(map_.m);
    for (int j = 0; j < map_.m; ++j)
      s(j) = cand_src_[best * static_cast<std::size_t>(map_.m) +
                       static_cast<std::size_t>(j)];
    return s;
  }

  /// Exhaustive-scan result, exposed for optimality checks in tests.
  std::size_t argmin_exhaustive(const Eigen::MatrixXcd& y) const {
    std::size_t best = 0;
    double best_res = residual(0, y);
    for (std::size_t c = 1; c < n_cand_; ++c) {
      const double r = residual(c, y);
      if (r < best_res) {
        best_res = r;
        best = c;
      }
    }
    return best;
  }

  double residual(std::size_t c, const Eigen::MatrixXcd& y) const {
    const std::complex<double>* p = proj_.data() + c * n_entries_;
    double acc = 0;
    std::size_t e = 0;
    for (Eigen::Index a = 0; a < y.rows(); ++a)
      for (Eigen::Index col = 0; col < y.cols(); ++col, ++e) {
        const std::complex<double> d = y(a, col) - p[e];
        acc += d.real() * d.real() + d.imag() * d.imag();
      }
    return acc;
  }

  double grid_value(std::size_t k) const { return grid_[k]; }
  std::size_t grid_size() const { return grid_.size(); }

 private:
  std::size_t decode_fast(const Eigen::MatrixXcd& y) const {
    // Least-squares vertex along the candidate line.
    double u = 0;
    std::size_t e = 0;
    for (Eigen::Index a = 0; a < y.rows(); ++a)
      for (Eigen::Index col = 0; col < y.cols(); ++col, ++e) {
        const std::complex<double> ae = fast_a_[e];
        const std::complex<double> ye = y(a, col);
        u += ae.real() * ye.real() + ae.imag() * ye.imag();
      }
    // Projections are (s - 1/2) * A with the gain folded into A.
    const double s_star = u / fast_a2_ + 0.5;
    // Window around the insertion point; residuals use the exhaustive
    // formula so tie behavior matches a full scan.
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), s_star);
    const std::ptrdiff_t pivot = it - grid_.begin();
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pivot - 4);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(grid_.size()) - 1, pivot + 4);
    std::size_t best = static_cast<std::size_t>(lo);
    double best_res = residual(best, y);
    for (std::ptrdiff_t c = lo + 1; c <= hi; ++c) {
      const double r = residual(static_cast<std::size_t>(c), y);
      if (r < best_res) {
        best_res = r;
        best = static_cast<std::size_t>(c);
      }
    }
    return best;
  }

  MappingDescriptor map_;
  double step_;
  std::vector<double> grid_;
  std::size_t n_cand_ = 0;
  std::size_t n_entries_ = 0;
  std::vector<double> cand_src_;
  std::vector<std::complex<double>> cand_slots_;
  std::vector<std::complex<double>> proj_;
  bool fast_linear_ = false;
  std::vector<std::complex<double>> fast_a_;
  double fast_a2_ = 0.0;
};

/// Exact conditional-mean estimator for linear mappings, with the uniform
/// prior approximated by a Gaussian of matched variance (1/12 per sample).
/// Estimates are clamped to [0,1]^m.
class MmseDecoder {
 public:
  MmseDecoder(const MappingDescriptor& map, const ChannelRealization& hr,
              const NoiseScale& noise)
      : map_(map) {
    if (map.kind != MappingKind::Linear)
      throw ConfigError("linear_mmse decoder is valid only for linear mappings");
    const int ne = static_cast<int>(hr.h.rows()) * map.n;  // complex entries
    Eigen::MatrixXd mr(2 * ne, map.m);
    for (int j = 0; j < map.m; ++j) {
      Eigen::MatrixXcd col = hr.h * linear_basis(map, j);
      for (int a = 0; a < col.rows(); ++a)
        for (int c = 0; c < col.cols(); ++c) {
          const int q = a * map.n + c;
          mr(2 * q, j) = col(a, c).real();
          mr(2 * q + 1, j) = col(a, c).imag();
        }
    }
    // Posterior gain K = (P^-1 + M^T R^-1 M)^-1 M^T R^-1 with
    // P = I/12 and R = (sigma_sq/2) I.
    const double r_inv = 2.0 / noise.sigma_sq;
    Eigen::MatrixXd info =
        12.0 * Eigen::MatrixXd::Identity(map.m, map.m) +
        r_inv * (mr.transpose() * mr);
    k_ = info.ldlt().solve(r_inv * mr.transpose());
  }

  Eigen::VectorXd decode(const Eigen::MatrixXcd& y) const {
    Eigen::VectorXd yv(2 * y.rows() * y.cols());
    for (Eigen::Index a = 0; a < y.rows(); ++a)
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const Eigen::Index q = a * y.cols() + c;
        yv(2 * q) = y(a, c).real();
        yv(2 * q + 1) = y(a, c).imag();
      }
    Eigen::VectorXd s = Eigen::VectorXd::Constant(map_.m, 0.5) + k_ * yv;
    for (int j = 0; j < map_.m; ++j) s(j) = std::clamp(s(j), 0.0, 1.0);
    return s;
  }

 private:
  MappingDescriptor map_;
  Eigen::MatrixXd k_;
};

/// One-shot decode through either decoder kind. Hot loops should hold a
/// GridDecoder / MmseDecoder directly and reuse it across blocks.
inline Eigen::VectorXd decode(const MappingDescriptor& map,
                              const DecoderSpec& dec,
                              const Eigen::MatrixXcd& y,
                              const ChannelRealization& hr,
                              const NoiseScale& noise) {
  dec.validate();
  if (dec.kind == DecoderKind::LinearMmse)
    return MmseDecoder(map, hr, noise).decode(y);
  GridDecoder g(map, dec.grid_step);
  g.prepare(hr);
  return g.decode(y);
}

// ---------------------------------------------------------------------------
// Cloud sampling
// ---------------------------------------------------------------------------

enum class SourceKind { Uniform, Gaussian };

/// Draws one source block. The Gaussian option starts from N(1/2, 1/12)
/// (the uniform source's mean and variance) and rejection-samples into
/// [0,1] so the result stays inside every mapping's domain; the truncation
/// shrinks the realized variance to about 0.66 of nominal.
inline void draw_source(rng::Engine& eng, SourceKind kind, int m, double* out) {
  if (kind == SourceKind::Uniform) {
    for (int j = 0; j < m; ++j) out[j] = eng.uniform();
    return;
  }
  const double sd = std::sqrt(1.0 / 12.0);
  for (int j = 0; j < m; ++j) {
    double v;
    do {
      v = 0.5 + sd * eng.normal();
    } while (v < 0.0 || v > 1.0);
    out[j] = v;
  }
}

/// Samples the modulation set: draws uniform source blocks, encodes them and
/// flattens each matrix to 2 n nt interleaved real coordinates. Weights are
/// uniform 1/n_samples.
inline ModulationPointCloud sample_cloud(const MappingDescriptor& map,
                                         std::size_t n_samples,
                                         std::uint64_t seed,
                                         SourceKind source = SourceKind::Uniform) {
  if (n_samples < 1000)
    throw ConfigError("sample_cloud: need n_samples >= 1000");
  ModulationPointCloud cloud;
  cloud.dim = map.ambient_dim();
  cloud.data.resize(n_samples * static_cast<std::size_t>(cloud.dim));
  rng::Engine eng{rng::substream(seed, rng::Stream::Cloud, 0)};
  std::vector<double> s(static_cast<std::size_t>(map.m));
  std::vector<std::complex<double>> slots(
      static_cast<std::size_t>(map.slots()));
  for (std::size_t i = 0; i < n_samples; ++i) {
    draw_source(eng, source, map.m, s.data());
    detail::encode_slots(map, s, slots.data());
    flatten_slots(slots.data(), map.slots(),
                  cloud.data.data() + i * static_cast<std::size_t>(cloud.dim));
  }
  return cloud;
}

/// Monte-Carlo check of the power normalization: E ||X||_F^2 / (n nt).
inline double measured_power(const MappingDescriptor& map,
                             std::size_t n_samples, std::uint64_t seed) {
  rng::Engine eng{rng::substream(seed, rng::Stream::Cloud, 1)};
  std::vector<double> s(static_cast<std::size_t>(map.m));
  std::vector<std::complex<double>> slots(
      static_cast<std::size_t>(map.slots()));
  double acc = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    draw_source(eng, SourceKind::Uniform, map.m, s.data());
    detail::encode_slots(map, s, slots.data());
    for (const auto& z : slots) acc += std::norm(z);
  }
  return acc / static_cast<double>(n_samples) / map.slots();
}

}  // namespace jscc
