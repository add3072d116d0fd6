#ifndef PHOENIXMAP_ERROR_HPP
#define PHOENIXMAP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace phoenixmap {

enum class ErrorCode {
    TooFewPoints,
    CollinearInput,
    OffsetSelfIntersection,
    DegenerateOutline,
    BadSegmentCount,
    DegenerateNormal,
    BadWindow,
    NonPositiveScale,
    EmptyScene,
    ParseError,
    NonFiniteCoordinate,
    SelfIntersectingOutline,
    TooFewVertices,
    InvalidConfig,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::CollinearInput: return "CollinearInput";
    case ErrorCode::OffsetSelfIntersection: return "OffsetSelfIntersection";
    case ErrorCode::DegenerateOutline: return "DegenerateOutline";
    case ErrorCode::BadSegmentCount: return "BadSegmentCount";
    case ErrorCode::DegenerateNormal: return "DegenerateNormal";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::SelfIntersectingOutline: return "SelfIntersectingOutline";
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Input errors come from data or configuration; everything else is a
/// geometric failure of the pipeline. The CLI maps these to exit codes 1 and 2.
constexpr bool is_input_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NonFiniteCoordinate:
    case ErrorCode::SelfIntersectingOutline:
    case ErrorCode::TooFewVertices:
    case ErrorCode::InvalidConfig:
    case ErrorCode::BadSegmentCount:
    case ErrorCode::BadWindow:
    case ErrorCode::NonPositiveScale:
    case ErrorCode::Io:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
        , detail_(what)
    {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// Error raised while reading a file; `location` is a 1-based line number
/// for CSV input or a 0-based feature index for GeoJSON input.
class LocatedError : public Error {
public:
    LocatedError(ErrorCode code, std::size_t location, const std::string& what)
        : Error(code, what)
        , location_(location)
    {}

    std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

} // namespace phoenixmap

#endif
