#pragma once

#include <stdexcept>
#include <string>

namespace simrec {

/// Base class for all domain errors thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonPositiveDefinite : public Error {
  public:
    using Error::Error;
};

class BadCorrelation : public Error {
  public:
    using Error::Error;
};

class EmptySupport : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

class BadThreshold : public Error {
  public:
    using Error::Error;
};

class SingularGram : public Error {
  public:
    using Error::Error;
};

class InfeasibleSubgradient : public Error {
  public:
    using Error::Error;
};

class BadShape : public Error {
  public:
    using Error::Error;
};

class BadKappa : public Error {
  public:
    using Error::Error;
};

class TooFewSamples : public Error {
  public:
    using Error::Error;
};

class SingularBlock : public Error {
  public:
    using Error::Error;
};

}  // namespace simrec
