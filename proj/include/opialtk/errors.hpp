#pragma once

#include <stdexcept>
#include <string>

namespace opialtk {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed function/basis/problem spec text.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Point or derivative order outside the declared domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced while evaluating a function or integrand.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// A Wronskian denominator fell below its floor.
class SingularWronskianError : public Error {
public:
    using Error::Error;
};

/// Kernel value genuinely negative where a nonnegative kernel is required.
class KernelNegativityError : public Error {
public:
    using Error::Error;
};

/// Weight function violated its positivity/floor hypothesis.
class WeightError : public Error {
public:
    using Error::Error;
};

/// Degenerate exponent combination (alpha + beta = 0, r = alpha, r = 1, ...)
/// or a negative base raised to a fractional power.
class ExponentError : public Error {
public:
    using Error::Error;
};

/// Exponent triple does not match the requested verification regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Integrand vanished below its floor in a negative-exponent regime.
class DegenerateIntegrandError : public Error {
public:
    using Error::Error;
};

/// Random generation could not produce a valid instance.
class GenerationError : public Error {
public:
    using Error::Error;
};

} // namespace opialtk
