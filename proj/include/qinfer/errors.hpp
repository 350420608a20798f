#pragma once

#include <stdexcept>
#include <string>

namespace qinfer {

/// Base class for all qinfer errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input shapes do not line up (vector/matrix sizes, label counts).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A square matrix was required.
class NotSquareError : public Error {
public:
    using Error::Error;
};

/// Matrix is singular to working precision.
class SingularError : public Error {
public:
    using Error::Error;
};

/// Condition estimate exceeds the configured cap.
class IllConditionedError : public Error {
public:
    using Error::Error;
};

/// A marginal entry needed as a divisor is (numerically) zero.
class ZeroMarginalError : public Error {
public:
    using Error::Error;
};

/// A vector/matrix fails its distribution invariants (sum, sign, finiteness).
class InvalidDistribution : public Error {
public:
    using Error::Error;
};

/// Parameter outside its documented domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Empty sample where at least one observation is required.
class EmptySampleError : public Error {
public:
    using Error::Error;
};

/// Desk-scale enumeration bounds exceeded.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or unparsable field.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Malformed rule specification string.
class RuleSpecError : public Error {
public:
    using Error::Error;
};

/// Rule compositions must have an odd number of terms.
class EvenLengthError : public RuleSpecError {
public:
    using RuleSpecError::RuleSpecError;
};

} // namespace qinfer
