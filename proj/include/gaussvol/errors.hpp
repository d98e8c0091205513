#pragma once

#include <stdexcept>
#include <string>

namespace gaussvol {

/// Bad caller input: malformed body, dimension mismatch, parameter out of range,
/// failed containment check. The CLI maps this to exit code 1.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A stochastic procedure could not complete: rejection exhaustion, vanishing
/// local conductance, nonfinite accumulation. The CLI maps this to exit code 2.
class SamplingError : public std::runtime_error {
public:
    explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gaussvol
