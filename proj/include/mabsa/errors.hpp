#pragma once

#include <stdexcept>
#include <string>

namespace mabsa {

// Operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A caller broke a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Input is well-shaped but numerically unusable (e.g. a zero-norm vector).
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DecodeError : public std::runtime_error {
public:
    DecodeError(std::size_t step, const std::string& what)
      : std::runtime_error("decode error at step " + std::to_string(step) + ": " + what),
        step_(step)
    { }

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mabsa
