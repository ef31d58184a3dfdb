#pragma once

#include <stdexcept>
#include <string>

namespace cdmkit {

// Precondition violations (malformed input, wrong degree, bad dimensions)
// are reported as std::invalid_argument. Numerical failures on well-formed
// input (singular systems, no stable factorization, imaginary-axis
// Hamiltonian eigenvalues) are reported as DomainError.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdmkit
