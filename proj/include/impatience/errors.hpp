#pragma once

#include <stdexcept>
#include <string>

namespace impatience {

// Bad argument to an operation (negative state, empty input, from > to, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested mode needs something the source does not provide, typically
// a declared almost-sure bound on the alpha marks.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cumulative interarrivals never reached the alpha bound within max_depth.
class DepthExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RenovationNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A pathwise invariant that must hold was observed to fail.
class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace impatience
