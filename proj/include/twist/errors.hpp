#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twist {

/// A precondition on an argument was violated.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input data (a table file, a cache) failed validation.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Memory or filesystem failure.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An eigenvalue table does not reach the index a computation needs.
class TableTooShort : public std::runtime_error {
public:
    TableTooShort(const std::string& what, std::int64_t required)
        : std::runtime_error(what), required_(required) {}
    std::int64_t required() const noexcept { return required_; }

private:
    std::int64_t required_;
};

/// Quadrature did not reach its error target; carries the achieved estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace twist
