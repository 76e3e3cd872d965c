#pragma once

#include <stdexcept>
#include <string>

namespace percodyn {

inline constexpr const char* kVersion = "1.0.0";

/// Thrown on contract violations: bad profiles, out-of-range levels,
/// oversized trees, malformed configuration files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every data-parallel kernel comes in two flavours. `serial` is the
/// reference loop; `parallel` is the OpenMP version, which must produce
/// bit-identical output.
enum class Exec { serial, parallel };

}  // namespace percodyn
