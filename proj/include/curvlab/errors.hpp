#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

/// Base class for all curvlab errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

struct InvalidMapping : Error {
    explicit InvalidMapping(const std::string& msg) : Error(msg) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& msg) : Error(msg) {}
};

struct NotCommutative : Error {
    explicit NotCommutative(const std::string& msg) : Error(msg) {}
};

struct NotInvolutive : Error {
    explicit NotInvolutive(const std::string& msg) : Error(msg) {}
};

struct NotConjugacyInvariant : Error {
    explicit NotConjugacyInvariant(const std::string& msg) : Error(msg) {}
};

struct BadSplit : Error {
    explicit BadSplit(const std::string& msg) : Error(msg) {}
};

struct UndefinedQStar : Error {
    explicit UndefinedQStar(const std::string& msg) : Error(msg) {}
};

struct InadmissibleR : Error {
    InadmissibleR(const std::string& clause, const std::string& msg)
        : Error("inadmissible R, clause " + clause + ": " + msg), clause(clause) {}
    std::string clause;
};

struct HypothesisFailed : Error {
    explicit HypothesisFailed(const std::string& msg) : Error(msg) {}
};

struct NotDecreasing : Error {
    explicit NotDecreasing(const std::string& msg) : Error(msg) {}
};

struct BadParams : Error {
    explicit BadParams(const std::string& msg) : Error(msg) {}
};

struct NoRoot : Error {
    explicit NoRoot(const std::string& msg) : Error(msg) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace curvlab
