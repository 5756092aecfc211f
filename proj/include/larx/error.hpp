#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace larx {

enum class Errc {
    structural,
    dimension_mismatch,
    empty_sample,
    degenerate_sample,
    zero_variance,
    domain,
    insufficient_history,
    unknown_proxy,
    empty_surviving_sample,
    nothing_to_fit,
    singular_multiplier,
    degenerate_constraint,
    infeasible_constraint,
    singular_matrix,
    unstable_process,
    empty_run,
    undefined_metric,
    unknown_coefficient,
    rank_deficient,
    csv_parse,
    config,
    io,
};

// Stable identifier used in machine-readable error output.
constexpr std::string_view code_name(Errc c) noexcept
{
    switch (c) {
    case Errc::structural: return "structural";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::empty_sample: return "empty_sample";
    case Errc::degenerate_sample: return "degenerate_sample";
    case Errc::zero_variance: return "zero_variance";
    case Errc::domain: return "domain";
    case Errc::insufficient_history: return "insufficient_history";
    case Errc::unknown_proxy: return "unknown_proxy";
    case Errc::empty_surviving_sample: return "empty_surviving_sample";
    case Errc::nothing_to_fit: return "nothing_to_fit";
    case Errc::singular_multiplier: return "singular_multiplier";
    case Errc::degenerate_constraint: return "degenerate_constraint";
    case Errc::infeasible_constraint: return "infeasible_constraint";
    case Errc::singular_matrix: return "singular_matrix";
    case Errc::unstable_process: return "unstable_process";
    case Errc::empty_run: return "empty_run";
    case Errc::undefined_metric: return "undefined_metric";
    case Errc::unknown_coefficient: return "unknown_coefficient";
    case Errc::rank_deficient: return "rank_deficient";
    case Errc::csv_parse: return "csv_parse";
    case Errc::config: return "config";
    case Errc::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace larx
