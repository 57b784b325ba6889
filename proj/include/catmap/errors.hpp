#ifndef CATMAP_ERRORS_HPP
#define CATMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace catmap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CATMAP_DEFINE_ERROR(Name)                       \
    struct Name : Error {                               \
        explicit Name(const std::string& msg = #Name)   \
            : Error(std::string(#Name) + ": " + msg) {} \
    }

// classical
CATMAP_DEFINE_ERROR(NotUnimodular);
CATMAP_DEFINE_ERROR(NotInGamma2);
CATMAP_DEFINE_ERROR(NotHyperbolic);
CATMAP_DEFINE_ERROR(KappaTooLarge);
CATMAP_DEFINE_ERROR(NotFound);

// hilbert / observables
CATMAP_DEFINE_ERROR(DimensionMismatch);
CATMAP_DEFINE_ERROR(BadWindow);
CATMAP_DEFINE_ERROR(NotNormalized);

// quantize
CATMAP_DEFINE_ERROR(GridTooCoarse);
CATMAP_DEFINE_ERROR(CutoffOverflow);
CATMAP_DEFINE_ERROR(OverlappingRegions);

// propagator
CATMAP_DEFINE_ERROR(UnsupportedN);
CATMAP_DEFINE_ERROR(UnitarityFailure);
CATMAP_DEFINE_ERROR(ConvergenceFailure);

// words
CATMAP_DEFINE_ERROR(EmptyWord);

// fup
CATMAP_DEFINE_ERROR(DegenerateScales);
CATMAP_DEFINE_ERROR(BadDigits);
CATMAP_DEFINE_ERROR(EmptySet);
CATMAP_DEFINE_ERROR(InsufficientData);

// cli
CATMAP_DEFINE_ERROR(ConfigError);
CATMAP_DEFINE_ERROR(MissingResults);
CATMAP_DEFINE_ERROR(NumericalFailure);

#undef CATMAP_DEFINE_ERROR

} // namespace catmap

#endif
