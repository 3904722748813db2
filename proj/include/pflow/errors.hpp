#pragma once

#include <stdexcept>
#include <string>

namespace pflow {

/// Malformed MATPOWER or JSON input; message carries line or path context.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A case that parses but violates model invariants (slack count, dangling
/// bus references, non-positive base power, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent sparse-matrix structure or mismatched dimensions.
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structurally or numerically singular linear system.
struct SingularError : std::runtime_error {
    SingularError(const std::string& what, int pivot_row)
        : std::runtime_error(what), pivot_row(pivot_row) {}

    int pivot_row;
};

}  // namespace pflow
