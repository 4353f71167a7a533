#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icid {

enum class ErrorKind {
    Parse,
    InvalidModel,
    InvalidArgument,
    SizeGuardExceeded,
    UnassignedParent,
    ZeroConditioningEvent,
    ClassMismatch,
    SingularSystem,
    BoundaryParameter,
    InconsistentPrior,
    PreconditionViolated,
    NoQualifyingTriple,
    DegenerateDenominator,
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind);

/// Domain error raised by every module. The kind is part of the CLI's
/// machine-readable error output.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace icid
