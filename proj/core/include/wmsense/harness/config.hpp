#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wmsense/periodogram_detector.hpp"
#include "wmsense/scf_detector.hpp"

namespace wmsense::harness {

enum class DetectorKind { periodogram, scf };

std::string_view to_string(DetectorKind kind) noexcept;
DetectorKind parse_detector(std::string_view name);

/// "periodogram", "scf" or "both".
std::vector<DetectorKind> parse_detector_list(std::string_view name);

/// Stable numeric id used in seed derivation.
std::uint64_t detector_id(DetectorKind kind) noexcept;

/// Everything a Monte Carlo experiment or a replay needs.
///
/// SNR is referenced to `noise_variance` inside `reference_bandwidth_hz`; each
/// detector simulates at its own complex-baseband rate and the per-sample noise
/// variance follows from the ratio of the two. The Brownian message has
/// `message_step_variance` per sample at the reference rate.
struct ExperimentConfig {
  std::vector<DetectorKind> detectors{DetectorKind::periodogram, DetectorKind::scf};
  std::vector<double> snr_db{-21.0};
  std::vector<double> beta{0.7};
  std::vector<double> target_fa{0.01, 0.05};
  std::size_t trials = 2000;
  std::size_t calibration_trials = 2000;
  std::uint64_t seed = 20150601;

  double reference_bandwidth_hz = 8e6;
  double noise_variance = 1.0;
  double message_step_variance = 1.0;
  NoiseVarianceMode noise_mode = NoiseVarianceMode::estimated;

  double periodogram_sample_rate_hz = 204800.0;
  PeriodogramSettings periodogram;

  double scf_sample_rate_hz = 819200.0;
  ScfSettings scf;

  /// Peak-scan threshold as a multiple of the noise floor (replay only).
  double scan_threshold_factor = 5.0;
  /// Peaks closer than this many bins to a stronger one are merged (replay only).
  // Three standard deviations of FM carrier wander at beta = 2 over one
  // periodogram decision: 3 * 2 * sqrt(0.15 s * 8 MHz) Hz at 100 Hz per bin.
  std::size_t peak_guard_bins = 66;

  double sample_rate_hz(DetectorKind kind) const noexcept;
  std::size_t segment_length(DetectorKind kind) const noexcept;
  std::size_t segments_per_decision(DetectorKind kind) const noexcept;
  double segment_duration_s(DetectorKind kind) const noexcept;
  /// Samples needed for one decision, N * segments.
  std::size_t decision_length(DetectorKind kind) const noexcept;

  /// Throws Errc::validation on the first violated invariant.
  void validate() const;
};

/// Resolved config as JSON (the form printed by --print-config).
nlohmann::json to_json(const ExperimentConfig& config);

/// Fields missing from `doc` keep their defaults; unknown keys, wrong types and
/// invalid values throw Errc::validation. The result is validated.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Reads and parses a JSON config file (Errc::io when unreadable).
ExperimentConfig load_config(const std::string& path);

}  // namespace wmsense::harness
