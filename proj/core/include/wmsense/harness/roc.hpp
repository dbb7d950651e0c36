#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wmsense/harness/config.hpp"

namespace wmsense::harness {

struct RocRow {
  DetectorKind detector = DetectorKind::periodogram;
  double snr_db = 0.0;
  double beta = 0.0;
  double target_fa = 0.0;
  double achieved_fa = 0.0;
  double detection_rate = 0.0;
  std::size_t trials = 0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
};

struct RocTable {
  std::vector<RocRow> rows;
};

/// Trial streams. Sub-seed of trial i is derive_seed(master, {detector_id,
/// stream, i}); the same seeds are reused across SNR and beta cells (common
/// random numbers), so cells differ only in the swept parameter.
enum class TrialStream : std::uint64_t { calibration = 0, held_out = 1, signal = 2 };

std::uint64_t trial_seed(std::uint64_t master, DetectorKind detector, TrialStream stream, std::size_t trial) noexcept;

/// Raw statistics of one (detector, snr, beta) cell, kept for distribution checks.
struct CellStatistics {
  DetectorKind detector = DetectorKind::periodogram;
  double snr_db = 0.0;
  double beta = 0.0;
  std::vector<double> calibration;  // H0
  std::vector<double> held_out;     // H0
  std::vector<double> signal;       // H1
};

/// For every (detector, snr, beta): threshold from `calibration_trials` H0
/// draws, achieved FA on `trials` fresh H0 draws and detection rate on
/// `trials` H1 draws, one row per target FA. H0 statistics do not depend on
/// beta and are computed once per (detector, snr).
RocTable run_roc(const ExperimentConfig& config, std::vector<CellStatistics>* statistics = nullptr);

/// Header: detector,snr_db,beta,target_fa,achieved_fa,detection_rate,trials,gamma,seed
void write_roc_csv(std::ostream& out, const RocTable& table);

/// Long format: detector,snr_db,beta,stream,trial,statistic
void write_statistics_csv(std::ostream& out, const std::vector<CellStatistics>& statistics);

}  // namespace wmsense::harness
