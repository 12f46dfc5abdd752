#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jscc/errors.hpp"
#include "jscc/rng.hpp"

namespace jscc {

/// A sampled modulation set: points in R^dim with probability masses.
/// Points are stored flat (row-major) to keep million-point clouds cheap.
/// An empty `weights` vector means uniform masses 1/size().
struct ModulationPointCloud {
  int dim = 0;
  std::vector<double> data;      ///< size() * dim coordinates
  std::vector<double> weights;   ///< empty => uniform

  std::size_t size() const {
    return dim > 0 ? data.size() / static_cast<std::size_t>(dim) : 0;
  }

  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  bool uniform_weights() const { return weights.empty(); }

  double weight(std::size_t i) const {
    return weights.empty() ? 1.0 / static_cast<double>(size()) : weights[i];
  }

  void validate() const {
    if (dim < 1) throw ConfigError("cloud: dim must be >= 1");
    if (data.size() % static_cast<std::size_t>(dim) != 0)
      throw ConfigError("cloud: data length not a multiple of dim");
    if (!weights.empty()) {
      if (weights.size() != size())
        throw ConfigError("cloud: weights length mismatch");
      double s = 0;
      for (double w : weights) {
        if (w < 0) throw ConfigError("cloud: negative weight");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-9)
        throw ConfigError("cloud: weights must sum to 1");
    }
  }
};

// ---------------------------------------------------------------------------
// Synthetic clouds with known dimension, used for estimator calibration.
// ---------------------------------------------------------------------------

/// Uniform samples on the segment [0,1] x {0}^(dim-1).
inline ModulationPointCloud make_segment_cloud(std::size_t n_samples, int dim,
                                               std::uint64_t seed) {
  ModulationPointCloud c;
  c.dim = dim;
  c.data.assign(n_samples * static_cast<std::size_t>(dim), 0.0);
  rng::Engine eng{rng::substream(seed, rng::Stream::Synthetic, 0)};
  for (std::size_t i = 0; i < n_samples; ++i)
    c.data[i * static_cast<std::size_t>(dim)] = eng.uniform();
  return c;
}

/// Uniform samples on the unit square [0,1]^2 x {0}^(dim-2).
inline ModulationPointCloud make_square_cloud(std::size_t n_samples, int dim,
                                              std::uint64_t seed) {
  if (dim < 2) throw ConfigError("square cloud needs dim >= 2");
  ModulationPointCloud c;
  c.dim = dim;
  c.data.assign(n_samples * static_cast<std::size_t>(dim), 0.0);
  rng::Engine eng{rng::substream(seed, rng::Stream::Synthetic, 1)};
  for (std::size_t i = 0; i < n_samples; ++i) {
    c.data[i * static_cast<std::size_t>(dim)] = eng.uniform();
    c.data[i * static_cast<std::size_t>(dim) + 1] = eng.uniform();
  }
  return c;
}

/// Uniform samples filling the full cube [0,1]^dim.
inline ModulationPointCloud make_cube_cloud(std::size_t n_samples, int dim,
                                            std::uint64_t seed) {
  ModulationPointCloud c;
  c.dim = dim;
  c.data.reserve(n_samples * static_cast<std::size_t>(dim));
  rng::Engine eng{rng::substream(seed, rng::Stream::Synthetic, 2)};
  for (std::size_t i = 0; i < n_samples; ++i)
    for (int j = 0; j < dim; ++j) c.data.push_back(eng.uniform());
  return c;
}

/// Mixture: an atom of mass `atom_mass` at the segment midpoint plus the
/// remaining mass uniform on the segment. Sampled, so weights stay uniform.
inline ModulationPointCloud make_mixture_cloud(std::size_t n_samples, int dim,
                                               double atom_mass,
                                               std::uint64_t seed) {
  if (!(atom_mass >= 0.0 && atom_mass <= 1.0))
    throw ConfigError("mixture cloud: atom_mass must lie in [0,1]");
  ModulationPointCloud c;
  c.dim = dim;
  c.data.assign(n_samples * static_cast<std::size_t>(dim), 0.0);
  rng::Engine eng{rng::substream(seed, rng::Stream::Synthetic, 3)};
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double u = eng.uniform();
    const double x = (u < atom_mass) ? 0.5 : eng.uniform();
    c.data[i * static_cast<std::size_t>(dim)] = x;
  }
  return c;
}

}  // namespace jscc
