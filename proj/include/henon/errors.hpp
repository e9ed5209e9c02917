#pragma once

#include <stdexcept>
#include <string>

namespace henon {

/// Base class for every failure the library reports deliberately.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// interval
struct DomainError : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// henon_core
struct SingularParameter : Error { using Error::Error; };
struct ComplexFixedPoints : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct DegenerateCycle : Error { using Error::Error; };

// gamma
struct NonSmoothPoint : Error { using Error::Error; };
struct LostBracket : Error { using Error::Error; };
struct EmptyBoundary : Error { using Error::Error; };

// manifold growth and tangency location
struct EigenvalueDegenerate : Error { using Error::Error; };
struct ExcessiveGrowth : Error { using Error::Error; };
struct BadBracket : Error { using Error::Error; };
struct AmbiguousCount : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// tincan
struct NonPositive : Error { using Error::Error; };
struct RhoTooLarge : Error { using Error::Error; };
struct MissingDegreeOneFlag : Error { using Error::Error; };

// cmc
struct OnExceptionalLine : Error { using Error::Error; };
struct SamplingTooCoarse : Error { using Error::Error; };
struct GraphTransformDiverged : Error { using Error::Error; };

// io and cache
struct ChecksumMismatch : Error { using Error::Error; };
struct CorruptCache : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace henon
