#pragma once
// Error hierarchy shared by all capkit modules. Every failure mode named in a
// module contract maps to exactly one of these types so callers can match on
// the class rather than parse message strings.

#include <stdexcept>
#include <string>

namespace capkit {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Precondition violations: bad lengths, non-finite values, empty inputs.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Pearson over a constant vector has no defined value.
class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

// Malformed or unresolved prompt template placeholders.
class TemplateError : public Error {
public:
    using Error::Error;
};

// Transport failure after exhausting the retry budget.
class OracleUnavailableError : public Error {
public:
    using Error::Error;
};

// Backend cannot serve the request (e.g. no per-token probabilities).
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Cholesky hit a non-positive pivot; the input was not positive definite.
class NotPositiveDefiniteError : public Error {
public:
    using Error::Error;
};

// Triangular solve hit a zero diagonal entry.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

// Token -> word alignment is incomplete.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Dataset file violates the JSONL schema; message carries the line number.
class IngestError : public Error {
public:
    using Error::Error;
};

// Synthetic corpus spec is internally infeasible.
class SpecError : public Error {
public:
    using Error::Error;
};

// Cosine similarity against a zero-length class mean.
class UndefinedSimilarityError : public Error {
public:
    using Error::Error;
};

}  // namespace capkit
