// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fadecast {

/// Precondition violated by a caller (bad shape, out-of-range argument).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent or unsupported configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A lookup table was built for a different model than the one supplied.
class FingerprintMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Linear-prediction fit could not be solved (rank-deficient regression).
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (model, LUT, CSV, config).
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace fadecast
