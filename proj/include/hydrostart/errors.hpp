#pragma once

#include <stdexcept>
#include <string>

namespace hydrostart {

// Validation failures: bad inputs, malformed files, out-of-range parameters.
// CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSurface : ValidationError {
    explicit InvalidSurface(const std::string& what) : ValidationError(what) {}
};

struct EmptySignal : ValidationError {
    explicit EmptySignal(const std::string& what) : ValidationError(what) {}
};

struct IncompatibleRates : ValidationError {
    explicit IncompatibleRates(const std::string& what) : ValidationError(what) {}
};

struct EmptyDataset : ValidationError {
    explicit EmptyDataset(const std::string& what) : ValidationError(what) {}
};

struct DegenerateDataset : ValidationError {
    explicit DegenerateDataset(const std::string& what) : ValidationError(what) {}
};

struct NonPositiveSigma : ValidationError {
    explicit NonPositiveSigma(const std::string& what) : ValidationError(what) {}
};

struct CampaignExhausted : ValidationError {
    explicit CampaignExhausted(const std::string& what) : ValidationError(what) {}
};

struct NoFeasibleStart : ValidationError {
    explicit NoFeasibleStart(const std::string& what) : ValidationError(what) {}
};

struct NoFeasiblePoint : ValidationError {
    explicit NoFeasiblePoint(const std::string& what) : ValidationError(what) {}
};

// Internal failures: numerical blow-ups, broken state. CLI maps to exit 1.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteState : InternalError {
    explicit NonFiniteState(const std::string& what) : InternalError(what) {}
};

struct UntrainedNet : InternalError {
    explicit UntrainedNet(const std::string& what) : InternalError(what) {}
};

// State file schema mismatch. CLI maps to exit 3.
struct StateVersionMismatch : std::runtime_error {
    explicit StateVersionMismatch(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hydrostart
