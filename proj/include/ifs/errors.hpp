#pragma once

#include <stdexcept>
#include <string>

namespace ifs {

/// Argument or payload outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A sequence (selector, record, branch) is shorter than the operation needs.
class LengthError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Size guards on derived systems and discretizations.
class GuardError : public std::length_error {
public:
    using std::length_error::length_error;
};

class UnsupportedKind : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConjugacyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ContractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ifs
