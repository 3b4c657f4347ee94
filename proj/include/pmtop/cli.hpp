#pragma once

#include <vector>

#include "pmtop/io.hpp"

namespace pmtop {

/// Batch front end. Exit codes: 0 all checks passed, 1 violations found,
/// 2 infeasible or precondition failures (and no violations), 3 config or
/// usage error.
int run_cli(int argc, const char* const* argv);

/// Exit code implied by a list of report records.
int exit_code_for(const std::vector<Json>& records);

}  // namespace pmtop
