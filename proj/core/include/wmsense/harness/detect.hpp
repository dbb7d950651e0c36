#pragma once

#include <filesystem>
#include <vector>

#include "wmsense/decision.hpp"
#include "wmsense/harness/calibration_store.hpp"
#include "wmsense/harness/config.hpp"
#include "wmsense/types.hpp"

namespace wmsense::harness {

struct DetectOptions {
  std::vector<DetectorKind> detectors{DetectorKind::periodogram};
  double target_fa = 0.05;
  /// Calibrate and store a missing threshold instead of failing with
  /// Errc::calibration_missing.
  bool auto_calibrate = true;
};

struct PeakDecision {
  DetectorKind detector = DetectorKind::periodogram;
  /// Absolute frequency of the emitter (capture centre + estimated offset).
  double frequency_hz = 0.0;
  /// Bin of the peak in the scan periodogram.
  std::size_t peak_bin = 0;
  /// Band SNR estimate around the peak, referenced like the simulations.
  double snr_db_estimate = 0.0;
  /// SNR (whole dB) of the calibration record used for the threshold.
  double calibration_snr_db = 0.0;
  Decision decision;
};

/// Scan, offset-correct and classify every emitter in `block`.
///
/// The capture rate must be an integer multiple D of each detector's rate.
/// With D = 1 the block is scanned with the detector's segment length and each
/// peak is evaluated in place; with D > 1 the scan uses N * D point segments
/// (same bin width) and each peak is brought to baseband by the front end
/// before evaluation. Peaks chained by gaps of at most `peak_guard_bins` form
/// one emitter, evaluated at its strongest bin. Thresholds come from `store` at the rounded SNR
/// estimate. Throws Errc::validation when the block is too short and
/// Errc::configuration when the rates are incompatible.
std::vector<PeakDecision> detect_block(const BasebandBlock& block, double center_freq_hz,
                                       const ExperimentConfig& config, const DetectOptions& options,
                                       const CalibrationStore& store);

/// read_iq_file followed by detect_block.
std::vector<PeakDecision> detect_file(const std::filesystem::path& iq_path, const ExperimentConfig& config,
                                      const DetectOptions& options, const CalibrationStore& store);

}  // namespace wmsense::harness
