#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace panelhet {

// Base for all validation failures.  what() is "<Code>: <detail>" so callers
// (and the CLI) can surface the violated precondition by name.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define PANELHET_DEFINE_ERROR(Name)                                   \
    struct Name : Error {                                             \
        explicit Name(const std::string& detail) : Error(#Name, detail) {} \
    }

PANELHET_DEFINE_ERROR(UnbalancedPanel);
PANELHET_DEFINE_ERROR(DuplicateCell);
PANELHET_DEFINE_ERROR(NonNumericValue);
PANELHET_DEFINE_ERROR(EmptyInput);
PANELHET_DEFINE_ERROR(MalformedCsv);
PANELHET_DEFINE_ERROR(PanelTooShort);
PANELHET_DEFINE_ERROR(LagTooLarge);
PANELHET_DEFINE_ERROR(DegenerateUnit);
PANELHET_DEFINE_ERROR(InvalidBandwidth);
PANELHET_DEFINE_ERROR(InvalidGrid);
PANELHET_DEFINE_ERROR(LengthMismatch);
PANELHET_DEFINE_ERROR(TooFewUnits);
PANELHET_DEFINE_ERROR(OutOfDomain);
PANELHET_DEFINE_ERROR(OutOfSupport);
PANELHET_DEFINE_ERROR(DegenerateDispersion);
PANELHET_DEFINE_ERROR(UnsupportedDerivativeKernel);
PANELHET_DEFINE_ERROR(UnsupportedEstimator);

#undef PANELHET_DEFINE_ERROR

}  // namespace panelhet
