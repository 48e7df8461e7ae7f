#pragma once

#include <stdexcept>
#include <string>

namespace ekr {

// Parameters outside the mathematical domain (k > n, p outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Request is well-formed but cannot be satisfied (t exceeds the number of k-sets, ...).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Work or memory required exceeds a configured cap.
class SaturationError : public std::runtime_error {
public:
    explicit SaturationError(const std::string& what) : std::runtime_error(what) {}
};

// Value does not fit the widest integer type available here.
class CapacityError : public std::range_error {
public:
    explicit CapacityError(const std::string& what) : std::range_error(what) {}
};

}  // namespace ekr
