#pragma once

#include <stdexcept>
#include <string>

namespace mpoly {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tensor construction / evaluation
struct InvalidShape : Error { using Error::Error; };
struct ShapeTooLarge : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct NonFiniteCoefficient : Error { using Error::Error; };
struct ArityMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidPermutation : Error { using Error::Error; };

// symmetry / polarization
struct HeterogeneousBlocks : Error { using Error::Error; };
struct GroupTooLarge : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

// polynomial extraction / composition
struct NotAMultipolynomial : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// sequence classes
struct ExponentMismatch : Error { using Error::Error; };
struct EmptySamples : Error { using Error::Error; };

// files
struct IoError : Error { using Error::Error; };

}  // namespace mpoly
