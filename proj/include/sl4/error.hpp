#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sl4 {

/// Failure categories reported by every public operation.
enum class ErrorKind {
    Config,
    Parse,
    NonPositiveCoefficient,
    EvaluationDomain,
    Inconclusive,
    PreconditionViolation,
    StepSizeUnderflow,
    BlowUp,
    SingularU,
    InvalidBoundaryForm,
    RankDeficient,
    NotSelfAdjoint,
    NotHermitian,
    NoValidMatchingPoint,
    BracketFailure,
    DegenerateG,
    TargetInfeasible,
    BracketNotVanishing,
    DependentConditions,
    SigmaInfeasible,
    NotBracketed,
    EigenvalueCollision,
    SingularBracketSystem,
    InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sl4
