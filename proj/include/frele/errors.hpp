#pragma once

#include <stdexcept>
#include <string>

namespace frele {

/** Base class for all errors thrown by this library. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define FRELE_DEFINE_ERROR(Name)                            \
  class Name : public Error {                               \
   public:                                                  \
    explicit Name(const std::string& msg) : Error(msg) {}   \
  }

/** A requested split would leave a segment empty or exceed the series. */
FRELE_DEFINE_ERROR(SplitTooSmall);
/** A channel has (near-)zero variance and cannot be standardized. */
FRELE_DEFINE_ERROR(DegenerateChannel);
/** The series is shorter than lookback + horizon. */
FRELE_DEFINE_ERROR(SeriesTooShort);
/** Two arrays that must agree in shape do not. */
FRELE_DEFINE_ERROR(ShapeMismatch);
/** A scalar or flag value is outside its documented domain. */
FRELE_DEFINE_ERROR(InvalidInput);
/** A spectrum's bin count is inconsistent with its origin length. */
FRELE_DEFINE_ERROR(InvalidSpectrum);
/** A spectrum has too few bins for the requested operation. */
FRELE_DEFINE_ERROR(TooFewBins);
/** An input collection is empty where at least one element is required. */
FRELE_DEFINE_ERROR(NoData);
/** A bin or element index is out of range for the operation. */
FRELE_DEFINE_ERROR(InvalidIndex);
/** A requested frequency lies outside the resolvable range. */
FRELE_DEFINE_ERROR(InvalidFrequency);
/** A requested frequency does not fall on an integer bin. */
FRELE_DEFINE_ERROR(NonIntegerFrequency);
/** A file could not be parsed; the message carries the offending line. */
FRELE_DEFINE_ERROR(ParseError);

#undef FRELE_DEFINE_ERROR

}  // namespace frele
