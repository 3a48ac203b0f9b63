#pragma once

#include <stdexcept>
#include <string>

namespace wmr {

/// Argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Iterative routine failed to converge, or an objective produced a non-finite value.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Root bracket does not straddle the requested threshold.
class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested measure has no closed form for this configuration (odd qubit count).
class UnsupportedMeasure : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid experiment configuration or command line.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

} // namespace detail
} // namespace wmr
