#pragma once

#include <string>
#include <vector>

namespace ggs {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Oracle-equivalence and formula-grid checks behind the `verify` subcommand.
// Each check is independent; the suite runs in a few seconds.
std::vector<CheckResult> run_verification(std::uint64_t seed = 20260810);

} // namespace ggs
