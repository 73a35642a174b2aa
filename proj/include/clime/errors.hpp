#pragma once

#include <stdexcept>
#include <string>

namespace clime {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& msg) : Error(msg) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

struct TooFewSamples : Error {
    explicit TooFewSamples(const std::string& msg) : Error(msg) {}
};

struct ZeroVariance : Error {
    explicit ZeroVariance(const std::string& msg) : Error(msg) {}
};

struct AllZero : Error {
    explicit AllZero(const std::string& msg) : Error(msg) {}
};

struct AllInfeasible : Error {
    explicit AllInfeasible(const std::string& msg) : Error(msg) {}
};

struct InsufficientClassSize : Error {
    explicit InsufficientClassSize(const std::string& msg) : Error(msg) {}
};

struct CyclingDetected : Error {
    explicit CyclingDetected(const std::string& msg) : Error(msg) {}
};

struct Unbounded : Error {
    explicit Unbounded(const std::string& msg) : Error(msg) {}
};

struct RefitFailure : Error {
    explicit RefitFailure(const std::string& msg) : Error(msg) {}
};

struct CsvError : Error {
    explicit CsvError(const std::string& msg) : Error(msg) {}
};

} // namespace clime
