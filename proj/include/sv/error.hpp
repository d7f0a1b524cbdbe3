#pragma once

#include <stdexcept>
#include <string>

namespace sv {

// Base class for all library errors. Monitor violations are values, not
// exceptions; exceptions are reserved for contract violations (bad events,
// bad arguments, exhausted bounds, malformed input).
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// An event fed to a machine or variable lies outside its alphabet.
class alphabet_error : public error {
public:
    using error::error;
};

// A value had the wrong shape (driver value not a trace, bad payload, ...).
class type_error : public error {
public:
    using error::error;
};

// Constructor/argument misuse (c = 0, duplicate node names, ...).
class domain_error : public error {
public:
    using error::error;
};

// Exploration bound exhausted where completeness was required.
class bound_error : public error {
public:
    using error::error;
};

// A schedule entry is inconsistent with the current network state.
class schedule_error : public error {
public:
    using error::error;
};

// Scenario/log text could not be parsed or failed validation.
class parse_error : public error {
public:
    using error::error;
};

} // namespace sv
