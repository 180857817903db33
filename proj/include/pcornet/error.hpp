#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcornet {

// Base of every error raised by the library. Callers that only want to report
// a failure can catch this one type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t row, std::size_t col)
      : Error(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }  // 1-based, counts the header
  std::size_t col() const noexcept { return col_; }  // 1-based, 0 if not cell-specific

private:
  std::size_t row_;
  std::size_t col_;
};

class TooFewObservations : public Error {
public:
  using Error::Error;
};

class ZeroVariance : public Error {
public:
  ZeroVariance(const std::string& gene)
      : Error("gene '" + gene + "' has zero variance"), gene_(gene) {}
  const std::string& gene() const noexcept { return gene_; }

private:
  std::string gene_;
};

class InvalidFolds : public Error {
public:
  using Error::Error;
};

class SingularSystem : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double duality_gap)
      : Error(what), gap_(duality_gap) {}
  double duality_gap() const noexcept { return gap_; }

private:
  double gap_;
};

class RankExceeded : public Error {
public:
  using Error::Error;
};

class IncompleteFits : public Error {
public:
  using Error::Error;
};

class InvalidPrecision : public Error {
public:
  using Error::Error;
};

class TooFewStatistics : public Error {
public:
  using Error::Error;
};

class DegenerateDistribution : public Error {
public:
  using Error::Error;
};

class InvalidThreshold : public Error {
public:
  using Error::Error;
};

class RocUndefined : public Error {
public:
  using Error::Error;
};

class GenerationFailure : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class KappaUndefined : public Error {
public:
  using Error::Error;
};

}  // namespace pcornet
