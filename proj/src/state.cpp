#include "nlchb/state.hpp"

namespace nlchb {

std::string to_string(Mode mode) { return mode == Mode::kLocal ? "local" : "nonlocal"; }

Mode parse_mode(const std::string& name) {
  if (name == "nonlocal") return Mode::kNonlocal;
  if (name == "local") return Mode::kLocal;
  throw Error("unknown mode '" + name + "' (expected nonlocal or local)");
}

}  // namespace nlchb
