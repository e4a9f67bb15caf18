#pragma once

#include <stdexcept>
#include <string>

namespace filterstab {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct NegativeEntry : Error {
  using Error::Error;
};
struct RowSumViolation : Error {
  using Error::Error;
};
struct EpsOutOfRange : Error {
  using Error::Error;
};
struct NotErgodic : Error {
  using Error::Error;
};
struct UnknownSymbol : Error {
  using Error::Error;
};
struct ZeroLikelihood : Error {
  using Error::Error;
};
struct DegenerateWedge : Error {
  using Error::Error;
};
struct WrongDimension : Error {
  using Error::Error;
};
struct NotDiscrete : Error {
  using Error::Error;
};
struct NotGaussian : Error {
  using Error::Error;
};
struct DivergentEntropy : Error {
  using Error::Error;
};
struct POutOfRange : Error {
  using Error::Error;
};
struct BadPartition : Error {
  using Error::Error;
};
struct HorizonTooShort : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

} // namespace filterstab
