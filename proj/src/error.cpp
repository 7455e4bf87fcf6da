#include "sl4/error.hpp"

namespace sl4 {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
        case ErrorKind::EvaluationDomain: return "EvaluationDomain";
        case ErrorKind::Inconclusive: return "Inconclusive";
        case ErrorKind::PreconditionViolation: return "PreconditionViolation";
        case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorKind::BlowUp: return "BlowUp";
        case ErrorKind::SingularU: return "SingularU";
        case ErrorKind::InvalidBoundaryForm: return "InvalidBoundaryForm";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NoValidMatchingPoint: return "NoValidMatchingPoint";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::DegenerateG: return "DegenerateG";
        case ErrorKind::TargetInfeasible: return "TargetInfeasible";
        case ErrorKind::BracketNotVanishing: return "BracketNotVanishing";
        case ErrorKind::DependentConditions: return "DependentConditions";
        case ErrorKind::SigmaInfeasible: return "SigmaInfeasible";
        case ErrorKind::NotBracketed: return "NotBracketed";
        case ErrorKind::EigenvalueCollision: return "EigenvalueCollision";
        case ErrorKind::SingularBracketSystem: return "SingularBracketSystem";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

}  // namespace sl4
