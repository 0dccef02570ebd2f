#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lrsched {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid numeric input: non-finite argument or value outside a function's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Violated call contract: mismatched lengths, missing required argument, bad state.
class ContractError : public Error {
public:
    using Error::Error;
};

// Non-finite intermediate produced by a numeric routine.
class NumericalError : public Error {
public:
    NumericalError(const std::string& msg, std::size_t step)
        : Error(msg + " (step " + std::to_string(step) + ")"), step_(step) {}
    explicit NumericalError(const std::string& msg) : Error(msg), step_(0) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

// Training dynamics blew past the divergence guard.
class DivergedError : public Error {
public:
    DivergedError(const std::string& msg, std::size_t last_valid_step)
        : Error(msg + " (last valid step " + std::to_string(last_valid_step) + ")"),
          last_valid_step_(last_valid_step) {}
    std::size_t last_valid_step() const { return last_valid_step_; }

private:
    std::size_t last_valid_step_;
};

// Root finder / line search could not make progress.
class SolverError : public Error {
public:
    using Error::Error;
};

// Episodic memory misuse (e.g. estimation from an empty store).
class EstimatorError : public Error {
public:
    using Error::Error;
};

// Malformed binary or text file; carries a byte offset when known.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t offset)
        : Error(msg + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
    explicit FormatError(const std::string& msg) : Error(msg), offset_(0) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Experiment configuration problem; message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lrsched
