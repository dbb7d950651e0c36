#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wmsense/decision.hpp"
#include "wmsense/spectral.hpp"
#include "wmsense/types.hpp"

namespace wmsense {

/// Gaussian model of the averaged periodogram of a bin-0 CW in white noise:
///   mean[0] = s2 (N snr + 1),        mean[k] = s2
///   variance[0] = s2^2 (2 N snr + 1) / M,  variance[k] = s2^2 / M
/// with zero covariance between bins.
struct CwReferenceModel {
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t segment_length = 0;
  std::size_t segment_count = 0;
  double noise_variance = 0.0;
  double snr = 0.0;
};

CwReferenceModel cw_reference_model(std::size_t segment_length, std::size_t segment_count, double noise_variance,
                                    double snr);

/// Moments of the averaged periodogram measured across its segments.
struct EmpiricalMoments {
  std::vector<double> mean;
  /// Unbiased per-segment sample covariance, N x N row-major. Empty when only
  /// the mean was requested.
  std::vector<double> covariance;
  std::size_t segment_length = 0;
  std::size_t segment_count = 0;

  double cov(std::size_t i, std::size_t j) const { return covariance[i * segment_length + j]; }
};

/// Throws Errc::invalid_parameter if the covariance is requested with M < 2.
EmpiricalMoments empirical_moments(std::span<const Periodogram> segments, bool with_covariance = true);

/// KL divergence D(N(mean_e, cov_e / M) || N(mean, diag(variance))).
///
/// The per-segment covariance is divided by M so both Gaussians describe the
/// averaged periodogram. A rank-deficient covariance (M <= N) gets a ridge of
/// 1e-6 * trace / N before the log-determinant.
double kl_statistic_full(const EmpiricalMoments& moments, const CwReferenceModel& ref);

enum class WindowPlacement {
  first_bins,  // bins 0 .. L-1
  centered,    // L bins circularly centred on bin 0
};

std::vector<std::size_t> window_bins(std::size_t segment_length, std::size_t window, WindowPlacement placement);

/// T_p = 1/2 sum_{k in window} (xi[k] - mean[k])^2 / variance[k].
double kl_statistic_windowed(std::span<const double> averaged_bins, const CwReferenceModel& ref, std::size_t window,
                             WindowPlacement placement = WindowPlacement::first_bins);

Decision decide_periodogram(std::span<const double> averaged_bins, const CwReferenceModel& ref, std::size_t window,
                            double threshold, WindowPlacement placement = WindowPlacement::first_bins,
                            const Provenance& provenance = {});

enum class NoiseVarianceMode { estimated, known };

struct PeriodogramSettings {
  std::size_t segment_length = 2048;
  std::size_t segment_count = 15;
  std::size_t window = 11;
  WindowPlacement placement = WindowPlacement::first_bins;
  StatisticKind statistic = StatisticKind::tp;  // tp or tp0
  bool correct_offset = true;
  /// Used when set; otherwise the noise floor is estimated from the data.
  std::optional<double> known_noise_variance;
};

struct PeriodogramEvaluation {
  double statistic = 0.0;
  double snr_estimate = 0.0;        // per-sample, from the centred bin 0
  double noise_variance = 0.0;      // per-sample noise level used
  double offset_bins = 0.0;         // tone position the block was re-centred on
  bool offset_low_confidence = false;
  AveragedPeriodogram centred;      // averaged periodogram after re-centring
};

/// Full per-candidate pipeline: averaged periodogram, two-bin offset estimate
/// (around `peak_bin` when given, else the strongest bin), correction, fresh
/// averaged periodogram, reference model from the measured bin-0 SNR, and the
/// configured statistic. Throws Errc::no_signal on an all-zero block.
PeriodogramEvaluation evaluate_periodogram(const BasebandBlock& block, const PeriodogramSettings& settings,
                                           std::optional<std::size_t> peak_bin = std::nullopt);

}  // namespace wmsense
