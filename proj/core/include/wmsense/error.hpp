#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmsense {

enum class Errc {
  invalid_parameter,
  aliasing,
  configuration,
  no_reliable_offset,
  not_applicable,
  no_signal,
  invalid_window,
  validation,
  io,
  calibration_missing,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; `code()` tells callers which
/// failure class occurred (the CLI maps it to an exit status).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool condition, Errc code, const char* what) {
  if (!condition) fail(code, what);
}

}  // namespace wmsense
