#pragma once

#include <stdexcept>
#include <string>

namespace mcg {

/// Base of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpecMismatch : Error {
  using Error::Error;
};

struct ParityError : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

/// A dt-term was present where only dt-free forms are accepted.
struct SplitRequired : Error {
  using Error::Error;
};

/// Curvature dω + ω² did not vanish; `witness` names the worst coefficient.
struct NotFlat : Error {
  NotFlat(const std::string& msg, std::string w) : Error(msg), witness(std::move(w)) {}
  std::string witness;
};

/// An odd element C with C² ≠ 0, or structure constants violating Jacobi.
struct NotHomological : Error {
  NotHomological(const std::string& msg, std::string w) : Error(msg), witness(std::move(w)) {}
  std::string witness;
};

struct AntisymmetryError : Error {
  using Error::Error;
};

/// Malformed input file (JSON shape, ranges).
struct InputError : Error {
  using Error::Error;
};

}  // namespace mcg
