#pragma once

#include <stdexcept>
#include <string>

namespace infodensity {

/// Input failed a contract check (bad manifest line, off-grid label, ...).
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An embedding or chat provider failed (transport, HTTP status, protocol).
/// The CLI maps this to exit code 3.
class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A human-label artifact reached a stage that must not see it.
class LeakageError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace infodensity
