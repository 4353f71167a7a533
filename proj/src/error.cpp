#include "icid/error.hpp"

namespace icid {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::SizeGuardExceeded: return "SizeGuardExceeded";
        case ErrorKind::UnassignedParent: return "UnassignedParent";
        case ErrorKind::ZeroConditioningEvent: return "ZeroConditioningEvent";
        case ErrorKind::ClassMismatch: return "ClassMismatch";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::BoundaryParameter: return "BoundaryParameter";
        case ErrorKind::InconsistentPrior: return "InconsistentPrior";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::NoQualifyingTriple: return "NoQualifyingTriple";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::Io: return "IoError";
    }
    return "Unknown";
}

}  // namespace icid
