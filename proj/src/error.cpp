#include "vnom/error.hpp"

namespace vnom {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kCapacity:
      return "capacity";
    case ErrorKind::kNumerical:
      return "numerical";
  }
  return "unknown";
}

}  // namespace vnom
