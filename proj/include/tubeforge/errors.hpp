#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tubeforge {

// Every failure raised by the library carries one of these kinds; the CLI
// maps them onto exit codes.
enum class ErrorKind {
  Validation,         // malformed input or violated model invariant
  Domain,             // argument outside the operation's domain
  Divergence,         // sum r_j^n >= 1, total volume infinite
  Precondition,       // e.g. lattice routine called on a nonlattice list
  PoleProximity,      // evaluation too close to a pole of the Mellin numerator
  Strip,              // inversion abscissa outside (D, n)
  Window,             // not enough zeros in the requested window
  BoundaryProximity,  // winding integral ambiguous, zero on/near contour
  Convergence,        // iteration or quadrature failed to converge
  Resource,           // enumeration guard exceeded
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when an enumeration would exceed its size guard.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t count)
      : Error(ErrorKind::Resource, what), count_(count) {}

  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

}  // namespace tubeforge
