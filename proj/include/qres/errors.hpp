#pragma once

#include <stdexcept>
#include <string>

namespace qres {

// Caller handed us something malformed (bad dimension, bad index, bad shape).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A physics invariant that should hold by construction was broken
// (non-Hermitian input where hermiticity is assumed, normalization drift, ...).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// External data (raw tables, config files) failed validation.
class DataValidation : public std::runtime_error {
public:
    explicit DataValidation(const std::string& what) : std::runtime_error(what) {}
};

// No optimizer restart reached its convergence criterion.
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qres
