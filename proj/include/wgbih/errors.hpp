#pragma once

#include <stdexcept>
#include <string>

namespace wgbih {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SelfIntersectingPolygon : public Error {
public:
  using Error::Error;
};

class EdgeNotIncident : public Error {
public:
  using Error::Error;
};

/// Malformed mesh input (file syntax, inconsistent topology, degenerate cells).
class MeshError : public Error {
public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
public:
  using Error::Error;
};

class SingularMass : public Error {
public:
  using Error::Error;
};

class InvalidR : public Error {
public:
  using Error::Error;
};

class InvalidLayout : public Error {
public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  using Error::Error;
};

class BoundaryNotZero : public Error {
public:
  using Error::Error;
};

/// Study configuration problem; the message carries the line and field.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace wgbih
