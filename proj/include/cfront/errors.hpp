#pragma once

#include <stdexcept>
#include <string>

namespace cfront {

// bad user input: config fields, parameter domains
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// query outside what the object supports (e.g. ridge distance with one facet)
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// solver or root finder could not deliver
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cfront
