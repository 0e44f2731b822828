#pragma once

#include <stdexcept>
#include <string>

namespace adsholo {

enum class ErrorCode {
    InputShape,
    DegenerateCovariance,
    KernelParity,
    PositivityViolation,
    CutoffUnreliable,
    InvalidInput,
    BreitenlohnerFreedman,
    InvalidPerturbation,
    SupportMargin,
    Underdetermined,
    RankDeficient,
    Config,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code says which contract was broken.
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
    case ErrorCode::InputShape: return "input-shape error";
    case ErrorCode::DegenerateCovariance: return "degenerate-covariance error";
    case ErrorCode::KernelParity: return "kernel-parity error";
    case ErrorCode::PositivityViolation: return "positivity-violation error";
    case ErrorCode::CutoffUnreliable: return "cutoff-unreliable error";
    case ErrorCode::InvalidInput: return "invalid-input error";
    case ErrorCode::BreitenlohnerFreedman: return "BF-bound error";
    case ErrorCode::InvalidPerturbation: return "invalid-perturbation error";
    case ErrorCode::SupportMargin: return "support-margin error";
    case ErrorCode::Underdetermined: return "underdetermined error";
    case ErrorCode::RankDeficient: return "rank-deficiency error";
    case ErrorCode::Config: return "config error";
    }
    return "error";
}

} // namespace adsholo
