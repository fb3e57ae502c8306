#pragma once

#include <stdexcept>
#include <string>

namespace chirplock {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Population leaked into the guard band at the top of the truncated ladder.
class TruncationOverflow : public Error {
public:
    TruncationOverflow(const std::string& what, double guard_population)
        : Error(what), guard_population_(guard_population) {}
    [[nodiscard]] double guard_population() const noexcept { return guard_population_; }

private:
    double guard_population_;
};

// Adaptive step size fell below the representable minimum.
class StepFailure : public Error {
public:
    using Error::Error;
};

// The sampled capture curve does not cross P = 1/2.
class BracketMiss : public Error {
public:
    using Error::Error;
};

// Phase-space grid does not contain the initial distribution.
class GridTooSmall : public Error {
public:
    using Error::Error;
};

// Time step exceeds the stability bound of the phase-space scheme.
class CFLViolation : public Error {
public:
    CFLViolation(const std::string& what, double admissible_step)
        : Error(what), admissible_step_(admissible_step) {}
    [[nodiscard]] double admissible_step() const noexcept { return admissible_step_; }

private:
    double admissible_step_;
};

}  // namespace chirplock
