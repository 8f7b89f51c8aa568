#pragma once

#include <stdexcept>
#include <string>

namespace bvpair {

enum class ErrorCode {
    InvalidArgument,
    NotInSupport,
    DegreeUnsupported,
    NotInBVA,
    SupportOverflow,
    CantorJumpInteraction,
    UndefinedDensity,
    NonLipschitz,
    NonStrictSequence,
    Unsupported,
    Parse,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// scenario runner can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::NotInSupport: return "not in support";
    case ErrorCode::DegreeUnsupported: return "degree unsupported";
    case ErrorCode::NotInBVA: return "not in BV_A";
    case ErrorCode::SupportOverflow: return "support overflow";
    case ErrorCode::CantorJumpInteraction: return "Cantor-jump interaction unsupported";
    case ErrorCode::UndefinedDensity: return "undefined density";
    case ErrorCode::NonLipschitz: return "non-Lipschitz map";
    case ErrorCode::NonStrictSequence: return "non-strict sequence";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Parse: return "parse error";
    }
    return "error";
}

} // namespace bvpair
