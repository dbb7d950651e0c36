#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "wmsense/scf_detector.hpp"
#include "wmsense/types.hpp"

namespace wmsense::harness {

/// Half-open bin range [lo, hi).
struct IndexRange {
  long lo = 0;
  long hi = 0;
};

/// Parses "lo:hi" (Errc::validation on malformed text or lo > hi).
IndexRange parse_range(std::string_view text);

struct SurfaceGrid {
  IndexRange alpha;
  IndexRange f;
};

/// CSV `alpha_bin,f_bin,magnitude` of the augmented SCF over the even alpha
/// bins in `grid.alpha` and every f bin in `grid.f`. Throws Errc::validation
/// when a bound leaves alpha in (-N, N) or f in [-N/2, N/2].
void write_scf_surface(std::ostream& out, const SpectrumFrame& frame, double kappa1, double kappa2,
                       const SurfaceGrid& grid);

enum class SyntheticKind { cw, fm };

SyntheticKind parse_synthetic_kind(std::string_view name);

/// Noise-free spectra: an on-bin CW with X[0] = amplitude, or the narrowband FM
/// surrogate with Gaussian-tapered magnitudes and random phases on bins
/// -half_bandwidth..half_bandwidth.
struct SyntheticSurfaceSpec {
  SyntheticKind kind = SyntheticKind::cw;
  std::size_t segment_length = 256;
  std::size_t smoothing = 33;
  std::size_t half_bandwidth = 4;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
};

SpectrumFrame synthetic_frame(const SyntheticSurfaceSpec& spec);

/// Offset-corrected first segment of a capture (length `settings.segment_length`).
SpectrumFrame capture_frame(const BasebandBlock& block, const ScfSettings& settings);

}  // namespace wmsense::harness
