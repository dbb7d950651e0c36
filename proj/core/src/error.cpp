#include "wmsense/error.hpp"

namespace wmsense {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid parameter";
    case Errc::aliasing: return "aliasing";
    case Errc::configuration: return "configuration error";
    case Errc::no_reliable_offset: return "no reliable offset";
    case Errc::not_applicable: return "not applicable";
    case Errc::no_signal: return "no signal";
    case Errc::invalid_window: return "invalid window";
    case Errc::validation: return "validation error";
    case Errc::io: return "i/o error";
    case Errc::calibration_missing: return "calibration missing";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace wmsense
