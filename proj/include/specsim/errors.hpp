#pragma once

#include <stdexcept>
#include <string>

namespace specsim {

// Base class for all errors raised by the simulator libraries.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (config, trace, profile, model, dataset).
struct ParseError : Error {
    using Error::Error;
};

// Well-formed input that violates a documented invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Config-level problems: unknown keys, inconsistent pools, bad policy params.
struct ConfigError : Error {
    using Error::Error;
};

// Event scheduled before the current simulation clock.
struct SchedulingInPast : Error {
    using Error::Error;
};

// predict() asked for a (model, hardware, op) absent from the profile.
struct UnknownProfileKey : Error {
    using Error::Error;
};

// Model file failed checksum or structural validation.
struct CorruptModelFile : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace specsim
