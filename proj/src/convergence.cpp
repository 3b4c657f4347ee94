#include "pmtop/convergence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pmtop {

std::string_view to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::harmonic: return "harmonic";
    case SequenceKind::constant_offset: return "constant_offset";
    case SequenceKind::alternating: return "alternating";
    case SequenceKind::geometric: return "geometric";
  }
  return "?";
}

SequenceKind sequence_kind_from_string(std::string_view s) {
  for (auto k : kAllSequenceKinds) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown sequence kind: " + std::string(s));
}

void SequenceSpec::validate() const {
  if (x.empty()) throw PreconditionError("sequence base point is empty");
  if (v.size() != x.size() || candidate_limit.size() != x.size()) {
    throw PreconditionError("sequence vectors have inconsistent dimensions");
  }
  if (kind == SequenceKind::geometric && !(q > 0.0 && q < 1.0)) {
    throw PreconditionError("geometric sequence needs q in (0, 1)");
  }
}

Vector SequenceSpec::term(std::uint64_t n) const {
  if (n == 0) throw PreconditionError("sequence index starts at 1");
  double f = 1.0;
  switch (kind) {
    case SequenceKind::harmonic: f = 1.0 / static_cast<double>(n); break;
    case SequenceKind::constant_offset: f = 1.0; break;
    case SequenceKind::alternating: f = (n % 2 == 0) ? 1.0 : -1.0; break;
    case SequenceKind::geometric: f = std::pow(q, static_cast<double>(n)); break;
  }
  return axpby(1.0, x, f, v);
}

SequenceSpec make_sequence(SequenceKind kind, Vector x, Vector v, double q) {
  SequenceSpec s{kind, x, std::move(v), q, x};
  s.validate();
  return s;
}

std::vector<std::uint64_t> probe_indices(std::uint64_t n_max) {
  if (n_max == 0) throw PreconditionError("n_max must be at least 1");
  std::vector<std::uint64_t> out{1};
  for (std::uint64_t p = 2; p < n_max; p *= 2) {
    out.push_back(p);
    if (p + 1 < n_max) out.push_back(p + 1);
    if (p > n_max / 2) break;
  }
  if (out.back() != n_max) out.push_back(n_max);
  return out;
}

ConvergenceVerdict check_mu_convergence(const PMSpace& space, const SequenceSpec& seq, std::span<const double> t_grid,
                                        double eps_conv, std::uint64_t n_max) {
  seq.validate();
  if (t_grid.empty()) throw PreconditionError("convergence grid is empty");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw PreconditionError("convergence grid must be positive");
  }
  const auto probes = probe_indices(n_max);
  std::vector<DistributionFunction> mus;
  mus.reserve(probes.size());
  for (auto n : probes) mus.push_back(space.mu(sub(seq.term(n), seq.candidate_limit)));

  ConvergenceVerdict verdict;
  verdict.n_used = n_max;
  verdict.per_t.resize(t_grid.size());
  parallel_chunks(kChunks, [&](std::size_t c) {
    for (std::size_t i = chunk_begin(t_grid.size(), c); i < chunk_begin(t_grid.size(), c + 1); ++i) {
      TEvidence ev;
      ev.t = t_grid[i];
      // Walk backwards from n_max while the gap stays below eps_conv.
      std::optional<std::uint64_t> n0;
      for (std::size_t k = probes.size(); k-- > 0;) {
        if (1.0 - mus[k](ev.t) < eps_conv) {
          n0 = probes[k];
        } else {
          break;
        }
      }
      ev.n0 = n0;
      ev.final_gap = 1.0 - mus.back()(ev.t);
      verdict.per_t[i] = ev;
    }
  });
  verdict.converges = true;
  for (const auto& ev : verdict.per_t) verdict.converges = verdict.converges && ev.n0.has_value();
  return verdict;
}

TopologicalVerdict check_topological_convergence(const PMSpace& space, const SequenceSpec& seq,
                                                 std::span<const Ball> balls, std::uint64_t n_max) {
  seq.validate();
  for (const auto& b : balls) {
    b.validate();
    if (b.center != seq.candidate_limit) throw PreconditionError("balls must be centered at the candidate limit");
  }
  TopologicalVerdict verdict;
  verdict.vacuous = balls.empty();
  const auto probes = probe_indices(n_max);
  std::vector<Vector> terms;
  terms.reserve(probes.size());
  for (auto n : probes) terms.push_back(seq.term(n));
  for (const auto& b : balls) {
    std::optional<std::uint64_t> n0;
    for (std::size_t k = probes.size(); k-- > 0;) {
      if (contains(space, b, terms[k])) {
        n0 = probes[k];
      } else {
        break;
      }
    }
    verdict.n0.push_back(n0);
    verdict.converges = verdict.converges && n0.has_value();
  }
  return verdict;
}

std::vector<Ball> default_local_base(const Vector& x, int K) {
  std::vector<Ball> out;
  for (int k = 2; k <= K; ++k) out.push_back(Ball{x, 1.0 / k, 1.0 / k});
  return out;
}

Vector normalized_direction(const PMSpace& space, const Vector& v) {
  if (is_zero(v)) return v;
  auto g = [&](double log_lambda) { return space.mu(scale(std::exp2(log_lambda), v))(1.0); };
  double lo = -100.0;
  double hi = 100.0;
  if (!(g(lo) >= 0.5) || g(hi) >= 0.5) return v;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) >= 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return scale(std::exp2(0.5 * (lo + hi)), v);
}

CheckReport convergence_equivalence(const PMSpace& space, const SequenceSpec& seq, std::span<const double> t_grid,
                                    double eps_conv, std::uint64_t n_max, int K) {
  CheckReport report("convergence_equivalence", 0);
  const auto mu_side = check_mu_convergence(space, seq, t_grid, eps_conv, n_max);
  const auto balls = default_local_base(seq.candidate_limit, K);
  const auto topo = check_topological_convergence(space, seq, balls, n_max);
  report.samples_run = 1;
  report.params["mu_converges"] = mu_side.converges ? 1.0 : 0.0;
  report.params["topological_converges"] = topo.converges ? 1.0 : 0.0;
  if (mu_side.converges != topo.converges) {
    report.add_violation({"verdicts disagree",
                          std::string(to_string(seq.kind)) + " x=" + fmt_vec(seq.x) + " v=" + fmt_vec(seq.v),
                          mu_side.converges ? 1.0 : 0.0, topo.converges ? 1.0 : 0.0});
  }
  return report;
}

}  // namespace pmtop
