#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Error taxonomy mirrors the CLI exit codes:
//   parse/IO -> 1, structure/axiom -> 2, numerical -> 3, internal consistency -> 4.

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

struct AxiomError : std::runtime_error {
    explicit AxiomError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an identity that holds by theorem fails to verify: either the
// input is not a valid symmetric cell or there is a bug. Never swallowed.
struct TheoremViolation : std::runtime_error {
    explicit TheoremViolation(const std::string& what) : std::runtime_error(what) {}
};

struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace selfsim
