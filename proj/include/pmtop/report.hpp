#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pmtop {

/// Thrown when an operation is called outside its contract (dimension
/// mismatch, a point that is not a member, reversed monotonicity arguments).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a witness construction cannot find the object the proof
/// promises. The message names the inequality that could not be satisfied.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { pass, fail, infeasible };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

struct Violation {
  std::string what;    // which clause was violated
  std::string inputs;  // human-readable sample that triggered it
  double lhs = 0.0;
  double rhs = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Outcome of a sampled check or a witness verification.
///
/// `verdict == fail` iff at least one violation was recorded. Only the first
/// `kMaxRecordedViolations` are kept verbatim; `violation_count` has the total.
/// `infeasible` marks a precondition or construction failure, which is a
/// finding about the instance, not a counterexample.
struct CheckReport {
  static constexpr std::size_t kMaxRecordedViolations = 8;

  std::string name;
  Verdict verdict = Verdict::pass;
  std::vector<Violation> violations;
  std::size_t violation_count = 0;
  std::size_t samples_run = 0;
  std::uint64_t seed = 0;
  std::string note;
  std::map<std::string, double> params;
  std::vector<CheckReport> parts;

  CheckReport() = default;
  CheckReport(std::string name_, std::uint64_t seed_) : name(std::move(name_)), seed(seed_) {}

  bool passed() const { return verdict == Verdict::pass; }
  bool failed() const { return verdict == Verdict::fail; }
  bool infeasible() const { return verdict == Verdict::infeasible; }

  void add_violation(Violation v);
  void mark_infeasible(std::string why);

  /// Merge the samples and violations of a same-named chunk (parallel workers).
  void merge(const CheckReport& chunk);

  /// Attach a sub-report; its violations and sample count roll up into this one.
  void add_part(CheckReport part);

  const CheckReport* part(std::string_view part_name) const;

  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

/// Pretty number formatting used in violation descriptions.
std::string fmt_num(double v);
std::string fmt_vec(const std::vector<double>& v);

}  // namespace pmtop
