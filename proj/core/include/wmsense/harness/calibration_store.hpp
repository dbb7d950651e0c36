#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wmsense/harness/config.hpp"

namespace wmsense::harness {

inline constexpr const char* calibration_dir_env = "WMSENSE_CALIBRATION_DIR";

struct CalibrationRecord {
  DetectorKind detector = DetectorKind::periodogram;
  nlohmann::json fingerprint;
  double target_fa = 0.0;
  double threshold = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double achieved_fa = 0.0;
  std::string created;  // UTC, ISO 8601
};

/// Every parameter the H0 statistic of `detector` depends on, including the
/// SNR the CW is simulated at.
nlohmann::json calibration_fingerprint(const ExperimentConfig& config, DetectorKind detector, double snr_db);

nlohmann::json to_json(const CalibrationRecord& record);
CalibrationRecord record_from_json(const nlohmann::json& doc);

/// Directory of JSON records, one file per (fingerprint, target FA, trials,
/// seed), named by an FNV-1a hash of that key. I/O failures throw Errc::io.
class CalibrationStore {
 public:
  explicit CalibrationStore(std::filesystem::path directory);

  /// $WMSENSE_CALIBRATION_DIR, else $XDG_CACHE_HOME/wmsense/calibration, else
  /// ~/.cache/wmsense/calibration, else ./.wmsense-calibration.
  static CalibrationStore from_environment();

  const std::filesystem::path& directory() const noexcept { return directory_; }

  /// Exact-match lookup; a file whose stored key differs is ignored.
  std::optional<CalibrationRecord> find(const nlohmann::json& fingerprint, double target_fa, std::size_t trials,
                                        std::uint64_t seed) const;

  void save(const CalibrationRecord& record) const;

  std::filesystem::path record_path(const nlohmann::json& fingerprint, double target_fa, std::size_t trials,
                                    std::uint64_t seed) const;

 private:
  std::filesystem::path directory_;
};

struct CalibrationResult {
  CalibrationRecord record;
  bool cache_hit = false;
};

/// Returns the stored record when one matches, otherwise runs Monte Carlo
/// calibration with `config.calibration_trials` H0 trials (plus as many
/// held-out trials for achieved_fa) and persists it.
CalibrationResult calibrate(const ExperimentConfig& config, DetectorKind detector, double snr_db, double target_fa,
                            const CalibrationStore& store);

/// Seed handed to calibrate_threshold for `detector`.
std::uint64_t calibration_seed(const ExperimentConfig& config, DetectorKind detector) noexcept;

}  // namespace wmsense::harness
