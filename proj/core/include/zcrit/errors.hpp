// Error types shared across the library. All carry a human-readable message
// naming the offending quantity; "what it is" lives in the type.
#pragma once

#include <stdexcept>
#include <string>

namespace zcrit {

struct DegreeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Central charge evaluated to exactly zero; the phase is undefined.
struct ZeroCharge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A candidate metric failed the pointwise positivity gate.
struct NotPositive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoHamiltonianAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The charge of the model vanishes, so Im(e^{-i phi} ...) has no meaning.
struct PhaseCollapse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace zcrit
