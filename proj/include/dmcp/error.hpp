#pragma once

#include <stdexcept>
#include <string>

namespace dmcp {

// Precondition violations on caller-supplied values.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Root finders and searches that fail to produce a usable answer.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A requested waveguide layout that cannot be fabricated (non-positive widths, lengths).
class InvalidGeometry : public std::invalid_argument {
 public:
  explicit InvalidGeometry(const std::string& what) : std::invalid_argument(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace detail
}  // namespace dmcp
