#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdelab {

enum class ErrorCode {
    InvalidArgument,
    EmptyIntersection,
    NegativeBase,
    ZeroWeight,
    InvalidExponent,
    CflViolation,
    LinearSolveDiverged,
    NotSubIntrinsic,
    NotIntrinsic,
    FSmallnessFails,
    HypothesisUnmet,
    RegimeMismatch,
    ZeroSolution,
    ProfileMissing,
    BadRange,
    DilationEscapesDomain,
    FormatError,
    ConfigError,
};

inline std::string_view to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyIntersection: return "EmptyIntersection";
        case ErrorCode::NegativeBase: return "NegativeBase";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::InvalidExponent: return "InvalidExponent";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::LinearSolveDiverged: return "LinearSolveDiverged";
        case ErrorCode::NotSubIntrinsic: return "NotSubIntrinsic";
        case ErrorCode::NotIntrinsic: return "NotIntrinsic";
        case ErrorCode::FSmallnessFails: return "FSmallnessFails";
        case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
        case ErrorCode::RegimeMismatch: return "RegimeMismatch";
        case ErrorCode::ZeroSolution: return "ZeroSolution";
        case ErrorCode::ProfileMissing: return "ProfileMissing";
        case ErrorCode::BadRange: return "BadRange";
        case ErrorCode::DilationEscapesDomain: return "DilationEscapesDomain";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failing operation in the library throws this.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace fdelab
