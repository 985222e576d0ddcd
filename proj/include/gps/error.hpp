#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gps {

enum class ErrorKind {
    range_order,
    segment_size,
    invalid_argument,
    coverage_gap,
    ambiguity,
    non_coprime,
    window_violation,
    admissibility,
    factorization,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::range_order: return "range_order";
        case ErrorKind::segment_size: return "segment_size";
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::coverage_gap: return "coverage_gap";
        case ErrorKind::ambiguity: return "ambiguity";
        case ErrorKind::non_coprime: return "non_coprime";
        case ErrorKind::window_violation: return "window_violation";
        case ErrorKind::admissibility: return "admissibility";
        case ErrorKind::factorization: return "factorization";
    }
    return "unknown";
}

// All library failures are reported through this type. what() is a single
// line of the form "<kind>: <detail>" so the CLI can forward it verbatim.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& detail) {
    if (!condition) throw Error(kind, detail);
}

}  // namespace gps
