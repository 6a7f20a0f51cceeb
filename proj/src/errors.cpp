#include "tubeforge/errors.hpp"

namespace tubeforge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Divergence: return "divergence error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::PoleProximity: return "pole-proximity error";
    case ErrorKind::Strip: return "strip error";
    case ErrorKind::Window: return "window error";
    case ErrorKind::BoundaryProximity: return "boundary-proximity error";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Resource: return "resource error";
  }
  return "error";
}

}  // namespace tubeforge
