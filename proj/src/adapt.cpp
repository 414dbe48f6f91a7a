#include "vsdag/adapt.hpp"

namespace vsdag {

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::constant:
      return "lms";
    case StepKind::normalized:
      return "nlms";
    case StepKind::posterior:
      return "plms";
  }
  return "?";
}

StepKind parse_step_kind(const std::string& name) {
  if (name == "lms" || name == "constant") return StepKind::constant;
  if (name == "nlms" || name == "normalized") return StepKind::normalized;
  if (name == "plms" || name == "posterior") return StepKind::posterior;
  throw PreconditionError("unknown step-size policy '" + name + "'");
}

}  // namespace vsdag
