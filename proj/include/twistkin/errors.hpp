#pragma once

#include <stdexcept>
#include <string>

namespace twistkin {

// Base classes map onto process exit codes: validation errors exit 2,
// numerical errors exit 3.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input rejected by schema or type checks.
struct SchemaError : ValidationError {
  using ValidationError::ValidationError;
};

// Input is well formed but physically inconsistent (dispersion violated,
// negative mass, incompatible settings, ...).
struct PhysicsError : ValidationError {
  using ValidationError::ValidationError;
};

// Transverse momentum transfer outside [|k1-k2|, k1+k2].
struct OutsideAnnulus : ValidationError {
  using ValidationError::ValidationError;
};

// Requested point sits on the annulus boundary closer than eps_boundary.
struct DegenerateBoundary : ValidationError {
  using ValidationError::ValidationError;
};

// Kinematics admit no solution (e.g. sphere radius below the annulus).
struct NoSolution : NumericalError {
  using NumericalError::NumericalError;
};

// Energy bookkeeping failed a consistency check.
struct EnergyMismatch : NumericalError {
  using NumericalError::NumericalError;
};

// Iterative scheme exhausted its budget before reaching tolerance.
struct NonConvergent : NumericalError {
  using NumericalError::NumericalError;
};

// Root bracketing or polishing failed.
struct RootFailure : NumericalError {
  using NumericalError::NumericalError;
};

// Grid too coarse for the oscillation count implied by the mode indices.
struct Undersampled : ValidationError {
  using ValidationError::ValidationError;
};

// Inverse problem not solvable at the requested regularization.
struct IllPosed : NumericalError {
  using NumericalError::NumericalError;
};

// Pattern has no interior fringe to measure.
struct NoFringe : NumericalError {
  using NumericalError::NumericalError;
};

// Spread search bracket never crosses the visibility threshold.
struct AlwaysVisible : NumericalError {
  using NumericalError::NumericalError;
};

struct NeverVisible : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace twistkin
