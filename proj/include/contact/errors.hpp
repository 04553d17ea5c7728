#pragma once

#include <stdexcept>
#include <string>

namespace contact {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct SingularPointError : Error { using Error::Error; };
struct NonConvergenceError : Error { using Error::Error; };
struct TruncationError : Error { using Error::Error; };
struct GridResolutionError : Error { using Error::Error; };
struct MemoryBudgetError : Error { using Error::Error; };
struct NonInvertibleError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct DegenerateFitError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace contact
