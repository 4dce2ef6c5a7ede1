#pragma once

#include <stdexcept>
#include <string>

namespace maxopf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network or scenario input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Network is not a tree rooted at bus 0 with a single root child.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside its domain (non-positive impedance, bad limits, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// The branch-flow sweep diverged or hit a non-positive voltage.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// The relaxed allocation program has no feasible point at x = 0.
class InfeasibleRelaxation : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle was asked to enumerate more than its guard allows.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// Inputs to a geometric inequality check violate its preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxopf
