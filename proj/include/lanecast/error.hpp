#pragma once

#include <stdexcept>
#include <string>

namespace lanecast {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateHeadings : public Error {
 public:
  DegenerateHeadings() : Error("headings cancel out; circular mean is undefined") {}
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class NoStub : public Error {
 public:
  NoStub() : Error("intersection has no lane stub of the requested direction") {}
};

class OutOfDomain : public Error {
 public:
  explicit OutOfDomain(double x) : Error("spline evaluated outside its domain at x=" + std::to_string(x)) {}
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class UnassignableTrajectory : public Error {
 public:
  explicit UnassignableTrajectory(const std::string& id)
      : Error("trajectory '" + id + "' never approaches the intersection") {}
};

class NoOverlap : public Error {
 public:
  NoOverlap() : Error("estimated and true center lines do not overlap") {}
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Malformed or mismatching input file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lanecast
