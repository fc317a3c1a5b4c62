#pragma once

#include <stdexcept>
#include <string>

namespace mortrisk {

// Domain errors (t <= 0, sigma2 <= 0, t_a > t_b, ...) throw std::invalid_argument.
// The types below cover the failure modes callers need to tell apart.

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InitializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by run_sampler when one chain fails; carries the failing chain id.
class ChainError : public std::runtime_error {
public:
    ChainError(int chain_id, const std::string& what)
        : std::runtime_error("chain " + std::to_string(chain_id) + ": " + what), chain_id_(chain_id) {}

    int chain_id() const noexcept { return chain_id_; }

private:
    int chain_id_;
};

/// A diagnostic requested for a loan it does not apply to (e.g. a residual for an active loan).
class NotApplicable : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mortrisk
