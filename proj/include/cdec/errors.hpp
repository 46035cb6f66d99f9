#ifndef CDEC_ERRORS_HPP_
#define CDEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cdec {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// A vector has fewer than two entries where a pmf was expected.
struct DimensionError : Error {
  using Error::Error;
};

// A vector is not a probability vector within the requested tolerance.
struct NotAPmf : Error {
  using Error::Error;
};

// An input contains NaN or infinity.
struct NonFinite : Error {
  using Error::Error;
};

// Ensemble members disagree on the number of classes.
struct DimensionMismatch : Error {
  using Error::Error;
};

// A label index lies outside 0..k-1.
struct LabelOutOfRange : Error {
  using Error::Error;
};

// An iterative solver failed to certify its result.
struct ConvergenceFailure : Error {
  using Error::Error;
};

// An operation that enumerates subsets was asked for too many classes.
struct TooManyClasses : Error {
  using Error::Error;
};

// The augmented region already carries all probability mass, so the
// optimal inflation factor is infinite.
struct DegenerateCoverage : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

// AUROC/AUPRC need at least one in-distribution and one OoD sample.
struct SingleClass : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  ParseError(int line_number, const std::string &what)
      : Error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
};

struct SchemaError : Error {
  std::string field;
  SchemaError(const std::string &field_name, const std::string &what)
      : Error("field '" + field_name + "': " + what), field(field_name) {}
};

struct InconsistentDimensions : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// An IDEC input row carries more than one ensemble member.
struct ShapeError : Error {
  using Error::Error;
};

struct MissingField : Error {
  std::string field;
  MissingField(const std::string &field_name, const std::string &what)
      : Error("missing field '" + field_name + "': " + what),
        field(field_name) {}
};

}  // namespace cdec

#endif  // CDEC_ERRORS_HPP_
