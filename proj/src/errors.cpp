#include "ssc/errors.hpp"

namespace ssc {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::DuplicateCell: return "DuplicateCell";
        case ErrorCode::NonAbsorbing: return "NonAbsorbing";
        case ErrorCode::NoPrePeriod: return "NoPrePeriod";
        case ErrorCode::NoTreatedUnit: return "NoTreatedUnit";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyEventTime: return "EmptyEventTime";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::OverlappingGroups: return "OverlappingGroups";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::InfeasibleLevel: return "InfeasibleLevel";
        case ErrorCode::GridError: return "GridError";
        case ErrorCode::InvalidDGP: return "InvalidDGP";
        case ErrorCode::InvalidPlan: return "InvalidPlan";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MissingFit: return "MissingFit";
    }
    return "Unknown";
}

}  // namespace ssc
