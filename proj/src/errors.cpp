#include "lgspi/errors.hpp"

namespace lgspi {

std::string_view kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::ShapeError: return "ShapeError";
        case ErrorKind::CycleError: return "CycleError";
        case ErrorKind::CovarianceError: return "CovarianceError";
        case ErrorKind::DanglingRef: return "DanglingRef";
        case ErrorKind::UnknownNode: return "UnknownNode";
        case ErrorKind::UnknownMember: return "UnknownMember";
        case ErrorKind::UnknownExternal: return "UnknownExternal";
        case ErrorKind::MemberClash: return "MemberClash";
        case ErrorKind::CombinabilityError: return "CombinabilityError";
        case ErrorKind::DegenerateEvidence: return "DegenerateEvidence";
        case ErrorKind::ExternalsPresent: return "ExternalsPresent";
        case ErrorKind::EmptyComponent: return "EmptyComponent";
        case ErrorKind::QueryError: return "QueryError";
    }
    return "Error";
}

}  // namespace lgspi
