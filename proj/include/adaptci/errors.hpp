#pragma once

#include <stdexcept>
#include <string>

namespace adaptci {

//! Bad input: malformed data, inconsistent configuration, violated preconditions.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

//! A computation that could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// forward_modulus could not bracket the requested distance budget
class NoMassAtDelta : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// sum of hinge weights vanished, so the modulus derivative is undefined
class DegenerateModulus : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class AllZeroWeights : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// smoother degrees of freedom n - 2 tr(L) + tr(L'L) too close to zero
class DegenerateDOF : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace adaptci
