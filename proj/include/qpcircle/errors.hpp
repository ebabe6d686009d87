#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpcircle {

/// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Mathematical precondition violated: bad parameter, point outside the
/// admissible range, malformed input data. CLI maps these to exit code 1.
class domain_error : public error {
public:
  explicit domain_error(const std::string& what) : error(what) {}
};

/// Operation requested on a system that does not support it
/// (e.g. a derivative of a homeomorphism-only fibre map).
class unsupported_error : public domain_error {
public:
  explicit unsupported_error(const std::string& what) : domain_error(what) {}
};

/// A standing hypothesis of the computation failed to verify, so the
/// result is refused rather than reported.
class hypothesis_error : public domain_error {
public:
  explicit hypothesis_error(const std::string& what) : domain_error(what) {}
};

/// Box images overlapped where the wandering hypothesis required them
/// disjoint. Carries the violating iterate; for a transitivity study this
/// is a result in its own right.
class wandering_violation : public hypothesis_error {
public:
  wandering_violation(const std::string& what, std::int64_t n)
      : hypothesis_error(what), n_(n) {}
  std::int64_t violating_n() const { return n_; }

private:
  std::int64_t n_;
};

/// Bad invocation: unknown subcommand, unknown catalog name, malformed
/// flags. CLI maps these to exit code 2.
class usage_error : public error {
public:
  explicit usage_error(const std::string& what) : error(what) {}
};

}  // namespace qpcircle
