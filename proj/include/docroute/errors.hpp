#pragma once

#include <stdexcept>
#include <string>

namespace docroute {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown flag values, missing inputs, invalid parameters.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Persistent-format problems: bad magic, version mismatch, checksum failure.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A model-provider call failed. `retryable` distinguishes transient
/// transport failures from permanent ones (bad request, exhausted retries).
class ProviderError : public Error {
public:
    ProviderError(std::string message, bool retryable_call = false)
        : Error(std::move(message)), retryable(retryable_call) {}

    bool retryable = false;
};

/// A pipeline stage failed; carries the stage name so callers can report
/// where in rewrite -> search -> fuse -> rerank -> generate things broke.
class PipelineError : public Error {
public:
    PipelineError(std::string stage_name, const std::string& message)
        : Error(stage_name + ": " + message), stage(std::move(stage_name)) {}

    std::string stage;
};

} // namespace docroute
