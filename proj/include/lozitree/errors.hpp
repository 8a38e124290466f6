#pragma once

#include <stdexcept>
#include <string>

namespace lozitree {

// Caller passed arguments that violate a documented precondition.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Mathematically undefined request (inverse of zero, sqrt of a negative, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A structural property the model guarantees failed to hold. Carries a short
// machine-readable witness description for serialization.
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what, std::string witness = {})
        : std::runtime_error(what), witness_(std::move(witness)) {}
    const std::string& witness() const { return witness_; }

  private:
    std::string witness_;
};

// Work exceeded a configured budget; reports how far the computation got.
struct ResourceError : std::runtime_error {
    ResourceError(const std::string& what, int achieved_depth)
        : std::runtime_error(what), achieved_depth_(achieved_depth) {}
    int achieved_depth() const { return achieved_depth_; }

  private:
    int achieved_depth_;
};

}  // namespace lozitree
