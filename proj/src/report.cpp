#include "pmtop/report.hpp"

#include <charconv>
#include <utility>

namespace pmtop {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::infeasible:
      return "infeasible";
  }
  return "?";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "infeasible") return Verdict::infeasible;
  throw std::invalid_argument("unknown verdict: " + std::string(s));
}

void CheckReport::add_violation(Violation v) {
  if (violations.size() < kMaxRecordedViolations) violations.push_back(std::move(v));
  ++violation_count;
  verdict = Verdict::fail;
}

void CheckReport::mark_infeasible(std::string why) {
  if (verdict != Verdict::fail) verdict = Verdict::infeasible;
  if (!note.empty()) note += "; ";
  note += std::move(why);
}

void CheckReport::merge(const CheckReport& chunk) {
  samples_run += chunk.samples_run;
  for (const auto& v : chunk.violations) {
    if (violations.size() < kMaxRecordedViolations) violations.push_back(v);
  }
  violation_count += chunk.violation_count;
  if (violation_count > 0) {
    verdict = Verdict::fail;
  } else if (chunk.infeasible()) {
    mark_infeasible(chunk.note);
  }
}

void CheckReport::add_part(CheckReport part) {
  samples_run += part.samples_run;
  for (const auto& v : part.violations) {
    if (violations.size() < kMaxRecordedViolations) violations.push_back(v);
  }
  violation_count += part.violation_count;
  if (violation_count > 0) {
    verdict = Verdict::fail;
  } else if (part.infeasible()) {
    mark_infeasible(part.name + ": " + part.note);
  }
  parts.push_back(std::move(part));
}

const CheckReport* CheckReport::part(std::string_view part_name) const {
  for (const auto& p : parts) {
    if (p.name == part_name) return &p;
  }
  return nullptr;
}

std::string fmt_num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "?";
  return std::string(buf, ptr);
}

std::string fmt_vec(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_num(v[i]);
  }
  out += ']';
  return out;
}

}  // namespace pmtop
