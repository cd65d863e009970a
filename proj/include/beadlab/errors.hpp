#pragma once

#include <stdexcept>
#include <string>

namespace beadlab {

// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InterlacingViolation : Error { using Error::Error; };
struct EmptyColumn : Error { using Error::Error; };
struct MatchingViolation : Error { using Error::Error; };
struct NotFlippable : Error { using Error::Error; };
struct InvalidPath : Error { using Error::Error; };
struct ExtremalSlope : Error { using Error::Error; };
struct UnrealizableSector : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct WindowExceeded : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace beadlab
