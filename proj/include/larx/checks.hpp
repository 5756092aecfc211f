#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace larx {

// One self-contained property check; `detail` carries the measured worst case.
struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

CheckResult check_operator_identities(std::uint64_t seed);
CheckResult check_ols_reduction(std::uint64_t seed);
CheckResult check_cca_equivalence(std::uint64_t seed);
CheckResult check_caa_equivalence(std::uint64_t seed);
CheckResult check_constrained_kkt(std::uint64_t seed);
CheckResult check_conditional_ols(std::uint64_t seed);
CheckResult check_synthetic_recovery(std::uint64_t seed);
CheckResult check_lsr_rank_one(std::uint64_t seed);

// Checks 1 to 8, in order.
std::vector<CheckResult> run_property_suite(std::uint64_t seed);

} // namespace larx
