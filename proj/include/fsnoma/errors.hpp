#pragma once

#include <stdexcept>
#include <string>

namespace fsnoma {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the supported domain.
class DomainError : public Error {
public:
  using Error::Error;
};

// Series did not meet its tolerance within max_terms.
class TruncationError : public Error {
public:
  using Error::Error;
};

// Contour or quadrature self-check failed.
class NonConvergence : public Error {
public:
  using Error::Error;
};

// Gamma pole families cannot be separated by the requested contour.
class PoleCollision : public Error {
public:
  using Error::Error;
};

// Structural parameter constraint violated (shared C, i.i.d. links).
class ConstraintError : public Error {
public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace fsnoma
