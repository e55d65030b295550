#pragma once

#include <stdexcept>
#include <string>

namespace casurf {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied input was violated (bad parameters,
/// malformed files, points off their quadric, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not complete: non-convergent sweeps, frame
/// drift, singular metrics. Carries the offending grid node when known.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int i = -1, int j = -1)
      : Error(what), i_(i), j_(j) {}

  int i() const { return i_; }
  int j() const { return j_; }
  bool has_location() const { return i_ >= 0 && j_ >= 0; }

 private:
  int i_;
  int j_;
};

}  // namespace casurf
