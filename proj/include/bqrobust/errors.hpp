#pragma once

#include <stdexcept>
#include <string>

namespace bqrobust {

// Base for all library errors. The CLI maps these to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a documented precondition is violated by the caller.
struct ContractViolation : Error {
  using Error::Error;
};

struct EmptyAfterNormalization : Error {
  using Error::Error;
};
struct EmptySequence : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct ZeroColumn : Error {
  using Error::Error;
};
struct MissingIdf : Error {
  using Error::Error;
};
struct EmptyIdf : Error {
  using Error::Error;
};
struct PoolTooSmall : Error {
  using Error::Error;
};
struct WrongK : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct UnknownQuestion : Error {
  using Error::Error;
};
struct EmptyGroundTruth : Error {
  using Error::Error;
};
struct WrongPartitionCount : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct DuplicateId : Error {
  using Error::Error;
};
struct BadMagic : Error {
  using Error::Error;
};
struct CountMismatch : Error {
  using Error::Error;
};

}  // namespace bqrobust
