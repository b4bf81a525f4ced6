#pragma once

#include <stdexcept>
#include <string>

namespace spreadq {

enum class ErrorCode {
    MissingFile,
    MalformedRow,
    NonPositivePrice,
    DuplicateDate,
    InsufficientOverlap,
    IndexOutOfRange,
    ZeroVariance,
    SampleTooShort,
    DegenerateRegressor,
    LengthMismatch,
    SeriesTooShort,
    SingularRegression,
    TooFewAssets,
    RangeOutOfBounds,
    EpisodeDone,
    EpisodeNotFinished,
    Bankrupt,
    ReturnBelowNegOne,
    EmptyReturns,
    ShapeMismatch,
    EmptyWindow,
    NoRecordedForward,
    NonFiniteLoss,
    DegenerateSpread,
    ZeroDispersion,
    NonPositiveEquity,
    TooFewReturns,
    IoError,
    ConfigError,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (and tests)
// can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace spreadq
