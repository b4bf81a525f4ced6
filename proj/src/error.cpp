#include "spreadq/error.hpp"

namespace spreadq {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SampleTooShort: return "SampleTooShort";
    case ErrorCode::DegenerateRegressor: return "DegenerateRegressor";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::SingularRegression: return "SingularRegression";
    case ErrorCode::TooFewAssets: return "TooFewAssets";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::EpisodeDone: return "EpisodeDone";
    case ErrorCode::EpisodeNotFinished: return "EpisodeNotFinished";
    case ErrorCode::Bankrupt: return "Bankrupt";
    case ErrorCode::ReturnBelowNegOne: return "ReturnBelowNegOne";
    case ErrorCode::EmptyReturns: return "EmptyReturns";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoRecordedForward: return "NoRecordedForward";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DegenerateSpread: return "DegenerateSpread";
    case ErrorCode::ZeroDispersion: return "ZeroDispersion";
    case ErrorCode::NonPositiveEquity: return "NonPositiveEquity";
    case ErrorCode::TooFewReturns: return "TooFewReturns";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace spreadq
