#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace merogeo {

using cplx = std::complex<double>;

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::string expected)
        : Error("syntax error at offset " + std::to_string(offset) + ": expected " + expected),
          offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string &expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

class ExponentNotInteger : public Error {
public:
    explicit ExponentNotInteger(std::size_t offset)
        : Error("exponent at offset " + std::to_string(offset) + " is not an integer"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Evaluation hit a pole (or a non-finite intermediate).
class PoleError : public Error {
public:
    explicit PoleError(cplx at) : Error("pole encountered"), at_(at) {}
    cplx at() const noexcept { return at_; }

private:
    cplx at_;
};

class DomainViolation : public Error {
public:
    using Error::Error;
};

class NotOrdinary : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Numeric failures: step underflow, Newton divergence, mid-loop stops.
class NumericFailure : public Error {
public:
    using Error::Error;
};

class VanishingUN : public NumericFailure {
public:
    VanishingUN() : NumericFailure("last coordinate velocity vanishes; cannot reparametrize") {}
};

class BranchCutCrossing : public Error {
public:
    using Error::Error;
};

class NewtonDivergence : public NumericFailure {
public:
    using NumericFailure::NumericFailure;
};

class BranchAmbiguity : public NumericFailure {
public:
    using NumericFailure::NumericFailure;
};

// Reading or writing files.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input files.
class InputError : public Error {
public:
    using Error::Error;
};

} // namespace merogeo
