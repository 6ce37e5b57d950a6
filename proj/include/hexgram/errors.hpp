#pragma once

#include <stdexcept>
#include <string>

namespace hexgram {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct InvalidOrderError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateMapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimplificationNotApplicable : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotPositiveDefiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

} // namespace hexgram
