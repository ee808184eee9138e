#pragma once

#include <stdexcept>
#include <string>

namespace reassembly {

/// Bad input data: undecodable files, schema violations, out-of-range
/// values, dimension mismatches, unknown ids.
class DataError : public std::runtime_error {
public:
    enum class Kind { Io, Parse, Schema, Validation, Dimension, UnknownId };

    DataError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// A computation refused because it would exceed a node, memory or
/// enumeration budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace reassembly
