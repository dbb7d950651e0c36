#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wmsense/types.hpp"

namespace wmsense {

/// xi[k] = |(1/sqrt(N)) sum_n x[n] exp(-j 2 pi k n / N)|^2.
struct Periodogram {
  std::vector<double> bins;

  std::size_t segment_length() const noexcept { return bins.size(); }
};

struct AveragedPeriodogram {
  std::vector<double> bins;
  std::size_t segment_length = 0;
  std::size_t segment_count = 0;
  double noise_variance = 0.0;
  bool noise_estimated = false;
};

struct Peak {
  std::size_t bin = 0;
  double power = 0.0;
};

struct PeakList {
  std::vector<Peak> peaks;  // descending power
  double threshold = 0.0;
};

/// Circular bin window [center - half_width, center + half_width].
struct BinWindow {
  std::size_t center = 0;
  std::size_t half_width = 0;
};

struct OffsetEstimate {
  /// Estimated tone frequency in bins, signed in (-N/2, N/2].
  double bins = 0.0;
  /// Largest bin of the pair used by the estimator.
  std::size_t peak_bin = 0;
  /// Set when the two largest bins were not adjacent; `bins` is then the peak
  /// bin itself.
  bool low_confidence = false;
};

Periodogram periodogram(std::span<const cplx> segment);

/// Per-segment periodograms of the first M non-overlapping length-N segments.
std::vector<Periodogram> segment_periodograms(const BasebandBlock& block, std::size_t segment_length,
                                              std::size_t segment_count);

/// Bin-wise mean of `segment_periodograms`. Without a known noise variance the
/// variance is estimated with an exclusion window around the strongest bin.
AveragedPeriodogram averaged_periodogram(const BasebandBlock& block, std::size_t segment_length,
                                         std::size_t segment_count,
                                         std::optional<double> known_noise_variance = std::nullopt);

AveragedPeriodogram average(std::span<const Periodogram> segments,
                            std::optional<double> known_noise_variance = std::nullopt);

/// Local maxima above threshold_factor * median; contiguous super-threshold
/// runs (circularly) collapse to their largest bin.
PeakList peak_scan(const AveragedPeriodogram& pg, double threshold_factor);

/// sin(pi N zeta) / sin(pi zeta), with the removable singularities at integer
/// zeta filled in (value N * (-1)^(m (N-1)) at zeta = m).
double sad(double zeta, std::size_t segment_length);

/// Two-bin leakage solver: the two largest bins k1, k2 of the averaged
/// periodogram and the known or estimated noise level fix the ratio
///   [sad(zeta[k1]) / sad(zeta[k2])]^2 = (xi[k1] - s2) / (xi[k2] - s2),
/// which is solved for the tone frequency between the two bins by bisection.
///
/// Throws Errc::not_applicable when the largest bin is below twice the median
/// and Errc::no_reliable_offset when either side of the ratio is not positive.
OffsetEstimate estimate_frequency_offset(const AveragedPeriodogram& pg);

/// Same estimator restricted to `peak_bin` and its two circular neighbours, for
/// spectra holding more than one emitter.
OffsetEstimate estimate_frequency_offset(const AveragedPeriodogram& pg, std::size_t peak_bin);

/// x[n] exp(-j 2 pi n T_s offset_hz).
BasebandBlock correct_offset(const BasebandBlock& block, double offset_hz);

double bins_to_hz(double bins, std::size_t segment_length, double sample_rate_hz) noexcept;

/// Default exclusion half-width used by `averaged_periodogram`.
std::size_t default_exclusion_half_width(std::size_t segment_length) noexcept;

/// Noise floor from bins outside `exclusion`. M >= 8: mean of the lowest 90%
/// of bins; M < 8: median. Either is divided by its expectation under
/// noise-only Gamma(M, 1/M) bins so the estimate is unbiased for white noise.
double estimate_noise_variance(const AveragedPeriodogram& pg, BinWindow exclusion);

}  // namespace wmsense
