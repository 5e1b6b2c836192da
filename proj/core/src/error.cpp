#include "zinfer/error.hpp"

namespace zinfer {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::ZViolation: return "ZViolation";
    case ErrorCode::TooManyIndicators: return "TooManyIndicators";
    case ErrorCode::SingularFactor: return "SingularFactor";
    case ErrorCode::SingularChannel: return "SingularChannel";
    case ErrorCode::IncompatibleChannel: return "IncompatibleChannel";
    case ErrorCode::CycleFound: return "CycleFound";
    case ErrorCode::BadProxyParents: return "BadProxyParents";
    case ErrorCode::ForbiddenEdgeIntoCounterfactual: return "ForbiddenEdgeIntoCounterfactual";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::FalsifiedModel: return "FalsifiedModel";
    case ErrorCode::IncompatibleR0: return "IncompatibleR0";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::DegenerateInit: return "DegenerateInit";
    case ErrorCode::InvalidM: return "InvalidM";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

}  // namespace zinfer
