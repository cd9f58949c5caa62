#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lgspi {

enum class ErrorKind {
    SyntaxError,
    ShapeError,
    CycleError,
    CovarianceError,
    DanglingRef,
    UnknownNode,
    UnknownMember,
    UnknownExternal,
    MemberClash,
    CombinabilityError,
    DegenerateEvidence,
    ExternalsPresent,
    EmptyComponent,
    QueryError,
};

std::string_view kind_name(ErrorKind kind);

// Every failure raised by the library. what() is "<KindName>: <detail>" so
// that callers printing the message always name the error class.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace lgspi
