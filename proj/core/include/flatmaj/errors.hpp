#pragma once

#include <stdexcept>
#include <string>

namespace flatmaj {

// Structurally invalid input: bad weights, non-projection matrices,
// unparsable documents. The CLI maps this to exit code 3.
class MalformedInput : public std::runtime_error {
public:
    explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed input that violates a hypothesis of the statement being
// instantiated (no overlapping block, commuting target, ...). Exit code 2.
class HypothesisViolation : public std::runtime_error {
public:
    explicit HypothesisViolation(const std::string& what) : std::runtime_error(what) {}
};

// Instance larger than the configured dimension cap.
class DimensionCapExceeded : public MalformedInput {
public:
    explicit DimensionCapExceeded(const std::string& what) : MalformedInput(what) {}
};

// A synthesis routine failed to reach its numeric contract. Exit code 4.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace flatmaj
