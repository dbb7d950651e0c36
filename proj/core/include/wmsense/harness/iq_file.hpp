#pragma once

#include <filesystem>
#include <string>

#include "wmsense/types.hpp"

namespace wmsense::harness {

/// Sidecar `<stem>.meta.json` next to the sample file.
struct IqMetadata {
  double sample_rate_hz = 0.0;
  double center_freq_hz = 0.0;
  std::string format = "cf32le";
};

struct IqCapture {
  BasebandBlock samples;
  IqMetadata metadata;
};

/// `capture.cf32` -> `capture.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& iq_path);

/// Interleaved float32 little-endian I/Q pairs. Missing or malformed files and
/// sidecars throw Errc::io.
IqCapture read_iq_file(const std::filesystem::path& iq_path);

/// Writes samples (rounded to float32) and the sidecar.
void write_iq_file(const std::filesystem::path& iq_path, const BasebandBlock& samples, double center_freq_hz);

}  // namespace wmsense::harness
