#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

/// Failure categories surfaced by the library. Each maps onto one of the
/// documented error conditions of the public operations.
enum class errc {
    invalid_cutoff,
    composition_error,
    degenerate_steady_state,
    solver_failure,
    propagation_failure,
    cutoff_overflow,
    undefined_normalization,
    window_error,
    invalid_filter,
    alignment_error,
    degenerate_splitter,
    undefined_visibility,
    undefined_ratio,
    domain_error,
    config_error,
    io_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_cutoff: return "invalid-cutoff";
        case errc::composition_error: return "composition-error";
        case errc::degenerate_steady_state: return "degenerate-steady-state";
        case errc::solver_failure: return "solver-failure";
        case errc::propagation_failure: return "propagation-failure";
        case errc::cutoff_overflow: return "cutoff-overflow";
        case errc::undefined_normalization: return "undefined-normalization";
        case errc::window_error: return "window-error";
        case errc::invalid_filter: return "invalid-filter";
        case errc::alignment_error: return "alignment-error";
        case errc::degenerate_splitter: return "degenerate-splitter";
        case errc::undefined_visibility: return "undefined-visibility";
        case errc::undefined_ratio: return "undefined-ratio";
        case errc::domain_error: return "domain-error";
        case errc::config_error: return "config-error";
        case errc::io_error: return "io-error";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw error(code, message);
}

inline void require(bool cond, errc code, const std::string& message) {
    if (!cond) fail(code, message);
}

} // namespace cqed
