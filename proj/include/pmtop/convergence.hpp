#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pmtop/balls.hpp"

namespace pmtop {

enum class SequenceKind { harmonic, constant_offset, alternating, geometric };

inline constexpr SequenceKind kAllSequenceKinds[] = {
    SequenceKind::harmonic, SequenceKind::constant_offset, SequenceKind::alternating, SequenceKind::geometric};

std::string_view to_string(SequenceKind k);
SequenceKind sequence_kind_from_string(std::string_view s);

/// x_n = x + v/n, x + v, x + (-1)^n v, or x + v q^n, for n >= 1.
struct SequenceSpec {
  SequenceKind kind = SequenceKind::harmonic;
  Vector x;
  Vector v;
  double q = 0.5;  // geometric only, in (0, 1)
  Vector candidate_limit;

  /// Throws PreconditionError on mismatched dimensions or q outside (0, 1).
  void validate() const;

  Vector term(std::uint64_t n) const;

  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

/// Convenience constructor with candidate_limit = x.
SequenceSpec make_sequence(SequenceKind kind, Vector x, Vector v, double q = 0.5);

inline constexpr double kConvergenceEpsilon = 1e-6;
inline constexpr std::uint64_t kDefaultNMax = 1'000'000'000'000ULL;

/// Probed indices: 1, then 2^k and 2^k + 1 while below n_max, then n_max.
/// Pairs of consecutive indices catch sequences that alternate.
std::vector<std::uint64_t> probe_indices(std::uint64_t n_max);

struct TEvidence {
  double t = 0.0;
  std::optional<std::uint64_t> n0;  // least probe from which the gap stays small
  double final_gap = 0.0;           // 1 - mu_{x_n - x}(t) at n_max

  friend bool operator==(const TEvidence&, const TEvidence&) = default;
};

struct ConvergenceVerdict {
  bool converges = false;
  std::vector<TEvidence> per_t;
  std::uint64_t n_used = 0;

  friend bool operator==(const ConvergenceVerdict&, const ConvergenceVerdict&) = default;
};

/// mu_{x_n - limit}(t) -> 1 for every grid t, decided on the probe schedule:
/// gap 1 - mu < eps_conv on every probe from some n0 up to n_max.
ConvergenceVerdict check_mu_convergence(const PMSpace& space, const SequenceSpec& seq, std::span<const double> t_grid,
                                        double eps_conv = kConvergenceEpsilon, std::uint64_t n_max = kDefaultNMax);

struct TopologicalVerdict {
  bool converges = true;
  bool vacuous = false;  // empty ball list
  std::vector<std::optional<std::uint64_t>> n0;

  friend bool operator==(const TopologicalVerdict&, const TopologicalVerdict&) = default;
};

/// Eventual membership of x_n in every listed ball on the probe schedule.
/// Balls must be centered at the candidate limit.
TopologicalVerdict check_topological_convergence(const PMSpace& space, const SequenceSpec& seq,
                                                 std::span<const Ball> balls, std::uint64_t n_max = kDefaultNMax);

/// {B(x, 1/k, 1/k) : 2 <= k <= K}. k = 1 would give level 1, which is not a ball.
std::vector<Ball> default_local_base(const Vector& x, int K = 10);

/// lambda v with mu_{lambda v}(1) as close to 1/2 as the family allows
/// (the jump point for step functions). Zero stays zero.
Vector normalized_direction(const PMSpace& space, const Vector& v);

/// Both verdicts for one sequence, with agreement recorded as a report.
CheckReport convergence_equivalence(const PMSpace& space, const SequenceSpec& seq, std::span<const double> t_grid,
                                    double eps_conv = kConvergenceEpsilon, std::uint64_t n_max = kDefaultNMax,
                                    int K = 10);

}  // namespace pmtop
