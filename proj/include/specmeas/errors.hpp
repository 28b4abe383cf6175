// Error taxonomy shared by the whole library.
#pragma once

#include <stdexcept>
#include <string>

namespace specmeas {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A circle measure fed to a conjugation-dependent operation is not symmetric.
struct NotSymmetric : Error {
  using Error::Error;
};

// A Szegoe recursion coefficient lies outside the closed unit disk.
struct CoefficientOutOfDisk : Error {
  using Error::Error;
};

// A moment vector left the moment space (negative Toeplitz/Hankel norm).
struct MomentSpaceViolation : Error {
  using Error::Error;
};

// The underlying measure has fewer support points than moments requested.
struct Degenerate : Error {
  using Error::Error;
};

struct RootFindingFailure : Error {
  using Error::Error;
};

struct EigensolverFailure : Error {
  using Error::Error;
};

struct GridMismatch : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct NewtonDivergence : Error {
  using Error::Error;
};

struct BinUnderflow : Error {
  using Error::Error;
};

struct InsideSpectrum : Error {
  using Error::Error;
};

}  // namespace specmeas
