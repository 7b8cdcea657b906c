#pragma once

#include <stdexcept>
#include <string>

namespace friable {

// Invalid argument outside an operation's mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A table, enumeration or evaluation budget would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative or floating-point procedure failed to reach its target.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace friable
