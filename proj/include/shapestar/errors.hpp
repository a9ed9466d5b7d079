#pragma once

#include <stdexcept>
#include <string>

namespace shapestar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Sum of landmark weights is (numerically) zero.
class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

/// A monomial of the objective cannot be produced by any term of the
/// relaxation's right-hand side.
class InfeasibleStructure : public Error {
 public:
  using Error::Error;
};

/// The min-eigenvector of the Gram block has a vanishing constant entry.
class ExtractionDegenerate : public Error {
 public:
  using Error::Error;
};

/// Nearest-rotation projection of a rank-deficient matrix.
class ProjectionDegenerate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace shapestar
