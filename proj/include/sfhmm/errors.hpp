#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sfhmm {

// All library errors derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (bad token, ragged row, duplicate edge, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data constraint (non-finite values).
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A block sampler met a time point with zero posterior mass.
class SamplingError : public Error {
 public:
  SamplingError(const std::string& what, long time_index)
      : Error(what), time_index_(time_index) {}
  long time_index() const noexcept { return time_index_; }

 private:
  long time_index_;
};

// A graph that has no perfect elimination ordering. suggested_fill is an
// edge whose addition removes the chordless cycle found during the search.
class NotDecomposableError : public Error {
 public:
  NotDecomposableError(const std::string& what, int u, int v)
      : Error(what), fill_u_(u), fill_v_(v) {}
  std::pair<int, int> suggested_fill() const noexcept { return {fill_u_, fill_v_}; }

 private:
  int fill_u_;
  int fill_v_;
};

}  // namespace sfhmm
