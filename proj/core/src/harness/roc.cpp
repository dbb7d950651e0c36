#include "wmsense/harness/roc.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <utility>

#include "wmsense/decision.hpp"
#include "wmsense/rng.hpp"
#include "wmsense/harness/simulate.hpp"

namespace wmsense::harness {

std::uint64_t trial_seed(std::uint64_t master, DetectorKind detector, TrialStream stream, std::size_t trial) noexcept {
  return derive_seed(master, {detector_id(detector), static_cast<std::uint64_t>(stream), trial});
}

namespace {

std::vector<double> draw(const ExperimentConfig& config, DetectorKind detector, double snr_db, double beta,
                         Hypothesis hypothesis, TrialStream stream, std::size_t count) {
  std::vector<double> stats(count);
  parallel_for(count, [&](std::size_t i) {
    stats[i] = trial_statistic(config, detector, snr_db, beta, hypothesis, trial_seed(config.seed, detector, stream, i));
  });
  return stats;
}

// Fixed formatting so identical runs give byte-identical files.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

RocTable run_roc(const ExperimentConfig& config, std::vector<CellStatistics>* statistics) {
  config.validate();
  RocTable table;
  for (DetectorKind detector : config.detectors) {
    for (double snr : config.snr_db) {
      const std::vector<double> calibration =
          draw(config, detector, snr, config.beta.front(), Hypothesis::cw, TrialStream::calibration,
               config.calibration_trials);
      const std::vector<double> held_out =
          draw(config, detector, snr, config.beta.front(), Hypothesis::cw, TrialStream::held_out, config.trials);
      std::map<double, double> thresholds;
      for (double fa : config.target_fa) thresholds[fa] = threshold_for_false_alarm(calibration, fa);

      for (double beta : config.beta) {
        const std::vector<double> signal =
            draw(config, detector, snr, beta, Hypothesis::fm, TrialStream::signal, config.trials);
        for (double fa : config.target_fa) {
          RocRow row;
          row.detector = detector;
          row.snr_db = snr;
          row.beta = beta;
          row.target_fa = fa;
          row.threshold = thresholds[fa];
          row.achieved_fa = exceedance_rate(held_out, row.threshold);
          row.detection_rate = exceedance_rate(signal, row.threshold);
          row.trials = config.trials;
          row.seed = config.seed;
          table.rows.push_back(row);
        }
        if (statistics) statistics->push_back({detector, snr, beta, calibration, held_out, signal});
      }
    }
  }
  return table;
}

void write_roc_csv(std::ostream& out, const RocTable& table) {
  out << "detector,snr_db,beta,target_fa,achieved_fa,detection_rate,trials,gamma,seed\n";
  for (const RocRow& r : table.rows) {
    out << to_string(r.detector) << ',' << num(r.snr_db) << ',' << num(r.beta) << ',' << num(r.target_fa) << ','
        << num(r.achieved_fa) << ',' << num(r.detection_rate) << ',' << r.trials << ',' << num(r.threshold) << ','
        << r.seed << '\n';
  }
}

void write_statistics_csv(std::ostream& out, const std::vector<CellStatistics>& statistics) {
  out << "detector,snr_db,beta,stream,trial,statistic\n";
  const std::pair<const char*, std::vector<double> CellStatistics::*> streams[] = {
      {"calibration", &CellStatistics::calibration},
      {"held_out", &CellStatistics::held_out},
      {"signal", &CellStatistics::signal},
  };
  for (const CellStatistics& cell : statistics) {
    for (const auto& [name, member] : streams) {
      const std::vector<double>& values = cell.*member;
      for (std::size_t i = 0; i < values.size(); ++i) {
        out << to_string(cell.detector) << ',' << num(cell.snr_db) << ',' << num(cell.beta) << ',' << name << ','
            << i << ',' << num(values[i]) << '\n';
      }
    }
  }
}

}  // namespace wmsense::harness
