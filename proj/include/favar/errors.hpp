#pragma once

#include <stdexcept>
#include <string>

namespace favar {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failures.
struct NonFiniteValue : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct DofTooSmall : Error { using Error::Error; };
struct FilterBlewUp : Error { using Error::Error; };
struct ChainDiverged : Error { using Error::Error; };
struct DivergedLoss : Error { using Error::Error; };
struct ExplosiveForecast : Error { using Error::Error; };

// Shape / configuration problems.
struct ConfigError : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct KOutOfRange : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct UnstableSpec : Error { using Error::Error; };
struct BadOrdering : Error { using Error::Error; };
struct TimeOutOfRange : Error { using Error::Error; };
struct DrawCountMismatch : Error { using Error::Error; };
struct OriginMismatch : Error { using Error::Error; };

// Data problems.
struct MissingVariable : Error { using Error::Error; };
struct NonNumericCell : Error { using Error::Error; };
struct UnknownCode : Error { using Error::Error; };
struct SeriesTooShort : Error { using Error::Error; };
struct NonPositiveForLog : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };

// Artifact plumbing.
struct StaleArtifact : Error { using Error::Error; };
struct BadArtifact : Error { using Error::Error; };

}  // namespace favar
