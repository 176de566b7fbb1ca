#pragma once

#include <stdexcept>
#include <string>

namespace fsoegc {

// A series or expansion failed its tail test within the term budget.
class NonConvergenceError : public std::runtime_error {
  public:
    explicit NonConvergenceError(const std::string& what)
        : std::runtime_error(what) {}
};

// Coincident pole families that epsilon-perturbation could not separate.
class PoleCollisionError : public std::runtime_error {
  public:
    explicit PoleCollisionError(const std::string& what)
        : std::runtime_error(what) {}
};

// The xi^2 > b validity condition of the combined-SNR formulas is violated.
class ValidityError : public std::runtime_error {
  public:
    explicit ValidityError(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace fsoegc
