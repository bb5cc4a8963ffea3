#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tscong {

// Malformed or incompatible input (dimension mismatch, bad parameter,
// unparseable file). The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The request is well-formed but exceeds what a solver can enumerate
// (e.g. boolean search beyond its dimension cap). CLI exit code 3.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numeric cross-check that must hold by construction failed.
// CLI exit code 4.
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace tscong
