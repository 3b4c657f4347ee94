#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pmtop {

using Vector = std::vector<double>;

inline constexpr int kMaxDim = 8;

/// Default relative probe steps for one-sided and two-sided limits.
inline constexpr std::array<double, 3> kProbeSteps{1e-3, 1e-6, 1e-9};

/// Relative offset used to step just past a jump of a distribution function.
inline constexpr double kCriticalOffset = 1e-9;

/// `count` logarithmically spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// 64 points on [1e-3, 1e3].
std::vector<double> default_t_grid();

/// Sampling configuration for every universally quantified check.
///
/// Vectors are drawn with independent standard normal coordinates.
struct SampleBudget {
  std::size_t n_vectors = 10000;
  std::size_t n_scalar_pairs = 10000;
  std::size_t n_witnesses = 20;
  std::size_t verify_samples = 200;
  std::vector<double> t_grid = default_t_grid();
  double epsilon = 1e-9;
  double epsilon_strict = 1e-12;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument when a count is zero, the grid is empty,
  /// unsorted or non-positive, or a tolerance is not positive.
  void validate() const;

  friend bool operator==(const SampleBudget&, const SampleBudget&) = default;
};

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream id). Streams for different ids do
/// not overlap in practice; the mapping is fixed so runs are reproducible.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Stable 64-bit hash of a tag, for naming RNG streams.
std::uint64_t stream_id(const char* tag, std::uint64_t index = 0);

double standard_normal(Rng& rng);
double uniform01(Rng& rng);  // in (0, 1)
Vector random_vector(Rng& rng, int dim, double scale = 1.0);

/// a = |g| / (|g| + |g'|) for independent standard normals g, g'.
double convex_weight(Rng& rng);

/// Log-uniform magnitude on [1e-2, 1e2] with a random sign.
double homogeneity_scalar(Rng& rng);

// Small vector algebra; all operands must share a dimension.
Vector add(std::span<const double> x, std::span<const double> y);
Vector sub(std::span<const double> x, std::span<const double> y);
Vector scale(double a, std::span<const double> x);
Vector axpby(double a, std::span<const double> x, double b, std::span<const double> y);
Vector neg(std::span<const double> x);
bool is_zero(std::span<const double> x);
Vector unit(int dim, int axis);

/// Deterministic probe vectors: 0, then +e_k and -e_k for every axis.
std::vector<Vector> probe_vectors(int dim);

/// Worker count: hardware concurrency capped by PM_TOPOLOGY_THREADS.
unsigned worker_count();

/// Number of chunks every sampled check is split into. Fixed so that the
/// per-chunk RNG streams, and therefore reports, do not depend on the
/// number of workers.
inline constexpr std::size_t kChunks = 8;

/// Sample count handled by chunk `chunk` when `total` samples are split.
std::size_t chunk_size(std::size_t total, std::size_t chunk);
std::size_t chunk_begin(std::size_t total, std::size_t chunk);

/// Run fn(chunk) for chunk in [0, n_chunks) across worker threads.
/// fn must only touch state owned by its chunk.
template <class Fn>
void parallel_chunks(std::size_t n_chunks, Fn&& fn);

}  // namespace pmtop

#include "pmtop/detail/parallel.hpp"
