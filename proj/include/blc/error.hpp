#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blc {

enum class ErrorKind {
    InvalidCase,
    PhiOutOfRange,
    GridTooSmall,
    GridMismatch,
    UnknownSpec,
    SeedNotOnGrid,
    AlphaUndefinedOnGrid,
    EqualPhis,
    WrongCaseFamily,
    DuplicatePhi,
    GridContainsSingularAxis,
    DegenerateMetric,
    DegenerateAlpha,
    InvalidConfig,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidCase: return "InvalidCase";
    case ErrorKind::PhiOutOfRange: return "PhiOutOfRange";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::UnknownSpec: return "UnknownSpec";
    case ErrorKind::SeedNotOnGrid: return "SeedNotOnGrid";
    case ErrorKind::AlphaUndefinedOnGrid: return "AlphaUndefinedOnGrid";
    case ErrorKind::EqualPhis: return "EqualPhis";
    case ErrorKind::WrongCaseFamily: return "WrongCaseFamily";
    case ErrorKind::DuplicatePhi: return "DuplicatePhi";
    case ErrorKind::GridContainsSingularAxis: return "GridContainsSingularAxis";
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::DegenerateAlpha: return "DegenerateAlpha";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable kind alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace blc
