#pragma once

#include <stdexcept>
#include <string>

namespace specbudget {

// Base class for every error the library throws. what() is "<Kind>: <detail>"
// so CLI layers can report without catching each type individually.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& detail)
        : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SPECBUDGET_ERROR_KIND(NAME)                       \
    class NAME : public Error {                           \
    public:                                               \
        explicit NAME(const std::string& detail)          \
            : Error(#NAME, detail) {}                     \
    }

// Numerical failures
SPECBUDGET_ERROR_KIND(NonFinite);           // NaN or Inf in input data
SPECBUDGET_ERROR_KIND(ConvergenceFailure);  // iterative decomposition did not converge
SPECBUDGET_ERROR_KIND(ZeroEnergy);          // all-zero matrix, energy ratios undefined
SPECBUDGET_ERROR_KIND(RankCollapse);        // sketch produced numerically zero columns

// Contract violations
SPECBUDGET_ERROR_KIND(OutOfRange);          // index or rank outside its valid interval
SPECBUDGET_ERROR_KIND(InvalidConfig);       // budget/sketch parameters violate invariants
SPECBUDGET_ERROR_KIND(BadDims);             // incompatible matrix dimensions
SPECBUDGET_ERROR_KIND(BadProfile);          // spectrum profile with non-positive parameters
SPECBUDGET_ERROR_KIND(EmptyInput);          // empty ensemble or budget list
SPECBUDGET_ERROR_KIND(MisalignedInput);     // ensemble and score sequences disagree

// File format failures
SPECBUDGET_ERROR_KIND(BadMagic);
SPECBUDGET_ERROR_KIND(BadVersion);
SPECBUDGET_ERROR_KIND(TruncatedPayload);
SPECBUDGET_ERROR_KIND(ParseError);
SPECBUDGET_ERROR_KIND(IoError);

#undef SPECBUDGET_ERROR_KIND

} // namespace specbudget
