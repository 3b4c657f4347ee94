#include "pmtop/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pmtop {

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw std::invalid_argument("log_grid needs 0 < lo <= hi and count >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_t_grid() { return log_grid(1e-3, 1e3, 64); }

void SampleBudget::validate() const {
  if (n_vectors == 0 || n_scalar_pairs == 0 || n_witnesses == 0 || verify_samples == 0) {
    throw std::invalid_argument("budget counts must be >= 1");
  }
  if (t_grid.empty()) throw std::invalid_argument("budget t_grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i])) {
      throw std::invalid_argument("budget t_grid must hold positive finite reals");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("budget t_grid must be strictly increasing");
    }
  }
  if (!(epsilon > 0.0) || !(epsilon_strict > 0.0)) {
    throw std::invalid_argument("budget tolerances must be positive");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xd1b54a32d192ed03ULL);
  std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
  return Rng(seq);
}

std::uint64_t stream_id(const char* tag, std::uint64_t index) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = tag; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t state = h ^ index;
  return splitmix64(state);
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

double uniform01(Rng& rng) {
  // 53 random bits mapped to the open interval (0, 1).
  const std::uint64_t bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Vector random_vector(Rng& rng, int dim, double scale) {
  Vector v(static_cast<std::size_t>(dim));
  for (auto& c : v) c = scale * standard_normal(rng);
  return v;
}

double convex_weight(Rng& rng) {
  const double g = std::abs(standard_normal(rng));
  const double h = std::abs(standard_normal(rng));
  if (g + h == 0.0) return 0.5;
  return g / (g + h);
}

double homogeneity_scalar(Rng& rng) {
  const double mag = std::pow(10.0, -2.0 + 4.0 * uniform01(rng));
  return (rng() & 1U) ? mag : -mag;
}

namespace {
void require_same(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("vector dimension mismatch");
}
}  // namespace

Vector add(std::span<const double> x, std::span<const double> y) {
  require_same(x, y);
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

Vector sub(std::span<const double> x, std::span<const double> y) {
  require_same(x, y);
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

Vector scale(double a, std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

Vector axpby(double a, std::span<const double> x, double b, std::span<const double> y) {
  require_same(x, y);
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

Vector neg(std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
  return out;
}

bool is_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double c) { return c == 0.0; });
}

Vector unit(int dim, int axis) {
  Vector e(static_cast<std::size_t>(dim), 0.0);
  e.at(static_cast<std::size_t>(axis)) = 1.0;
  return e;
}

std::vector<Vector> probe_vectors(int dim) {
  std::vector<Vector> probes;
  probes.emplace_back(static_cast<std::size_t>(dim), 0.0);
  for (int k = 0; k < dim; ++k) {
    probes.push_back(unit(dim, k));
    probes.push_back(neg(unit(dim, k)));
  }
  return probes;
}

unsigned worker_count() {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PM_TOPOLOGY_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // ignore malformed caps
    }
  }
  return n;
}

std::size_t chunk_begin(std::size_t total, std::size_t chunk) {
  return total * chunk / kChunks;
}

std::size_t chunk_size(std::size_t total, std::size_t chunk) {
  return chunk_begin(total, chunk + 1) - chunk_begin(total, chunk);
}

}  // namespace pmtop
