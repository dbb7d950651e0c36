#include "wmsense/harness/detect.hpp"

#include <algorithm>
#include <cmath>

#include "wmsense/error.hpp"
#include "wmsense/sigmodel.hpp"
#include "wmsense/spectral.hpp"
#include "wmsense/harness/iq_file.hpp"
#include "wmsense/harness/simulate.hpp"

namespace wmsense::harness {

namespace {

long signed_bin(std::size_t bin, std::size_t n) {
  return bin > n / 2 ? static_cast<long>(bin) - static_cast<long>(n) : static_cast<long>(bin);
}

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n) {
  const std::size_t d = a > b ? a - b : b - a;
  return std::min(d, n - d);
}

// Single-linkage grouping: peaks chained by gaps of at most `guard` bins form
// one emitter, represented by its strongest member.
std::vector<Peak> guarded_peaks(const AveragedPeriodogram& pg, double factor, std::size_t guard) {
  std::vector<Peak> kept;
  if (pg.noise_variance <= 0.0) return kept;
  const std::vector<Peak> peaks = peak_scan(pg, factor).peaks;
  std::vector<std::size_t> parent(peaks.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  const auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (circular_distance(peaks[i].bin, peaks[j].bin, pg.segment_length) <= guard) {
        // Peaks arrive in descending power, so the lower index stays the root.
        const std::size_t a = root(i), b = root(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (root(i) == i) kept.push_back(peaks[i]);
  }
  return kept;
}

// Excess power within +-guard bins of the peak over the noise floor, as an SNR
// referenced to `reference_bandwidth_hz`.
double band_snr_db(const AveragedPeriodogram& pg, std::size_t peak, std::size_t guard, double rate,
                   double reference_bandwidth_hz) {
  const std::size_t n = pg.segment_length;
  const long g = static_cast<long>(std::min(guard, (n - 1) / 2));
  double excess = 0.0;
  for (long k = -g; k <= g; ++k) {
    const auto idx = static_cast<std::size_t>((static_cast<long>(peak) + k + static_cast<long>(n)) % static_cast<long>(n));
    excess += pg.bins[idx] - pg.noise_variance;
  }
  const double per_sample = excess / (static_cast<double>(n) * pg.noise_variance);
  return linear_to_db(std::max(per_sample * rate / reference_bandwidth_hz, 1e-12));
}

struct Evaluated {
  double statistic;
  double offset_bins;
};

Evaluated evaluate(const ExperimentConfig& config, DetectorKind detector, const BasebandBlock& block,
                   std::optional<std::size_t> peak_bin) {
  if (detector == DetectorKind::periodogram) {
    const PeriodogramEvaluation e = evaluate_periodogram(block, periodogram_settings(config), peak_bin);
    return {e.statistic, e.offset_bins};
  }
  const ScfEvaluation e = evaluate_scf(block, scf_settings(config), peak_bin);
  return {e.ta.value, e.offset_bins};
}

CalibrationRecord threshold_for(const ExperimentConfig& config, DetectorKind detector, double snr_db,
                                const DetectOptions& options, const CalibrationStore& store) {
  const auto fp = calibration_fingerprint(config, detector, snr_db);
  if (auto hit = store.find(fp, options.target_fa, config.calibration_trials, calibration_seed(config, detector))) {
    return *hit;
  }
  if (!options.auto_calibrate) {
    fail(Errc::calibration_missing, "no calibration for " + std::string(to_string(detector)) + " at " +
                                        std::to_string(snr_db) + " dB; run `calibrate` first");
  }
  return calibrate(config, detector, snr_db, options.target_fa, store).record;
}

}  // namespace

std::vector<PeakDecision> detect_block(const BasebandBlock& block, double center_freq_hz,
                                       const ExperimentConfig& config, const DetectOptions& options,
                                       const CalibrationStore& store) {
  config.validate();
  std::vector<PeakDecision> out;
  for (DetectorKind detector : options.detectors) {
    const double rate = config.sample_rate_hz(detector);
    const std::size_t n = config.segment_length(detector);
    const std::size_t m = config.segments_per_decision(detector);
    const double ratio = block.sample_rate() / rate;
    const auto decimation = static_cast<std::size_t>(std::llround(ratio));
    if (decimation < 1 || std::abs(ratio - static_cast<double>(decimation)) > 1e-9 * ratio) {
      fail(Errc::configuration, "capture rate must be an integer multiple of the " +
                                    std::string(to_string(detector)) + " rate");
    }
    const std::size_t scan_n = n * decimation;
    const std::size_t scan_m = std::min(m, block.size() / scan_n);
    if (scan_m < 1 || (decimation == 1 && scan_m < m)) {
      fail(Errc::validation, "capture too short for one " + std::string(to_string(detector)) + " decision");
    }
    const AveragedPeriodogram scan = averaged_periodogram(block, scan_n, scan_m);
    const double bin_hz = rate / static_cast<double>(n);

    for (const Peak& peak : guarded_peaks(scan, config.scan_threshold_factor, config.peak_guard_bins)) {
      PeakDecision pd;
      pd.detector = detector;
      pd.peak_bin = peak.bin;
      pd.snr_db_estimate =
          band_snr_db(scan, peak.bin, config.peak_guard_bins, block.sample_rate(), config.reference_bandwidth_hz);
      pd.calibration_snr_db = std::round(pd.snr_db_estimate);

      Evaluated e{};
      double base_hz = 0.0;
      if (decimation == 1) {
        e = evaluate(config, detector, block, peak.bin);
        if (e.offset_bins > static_cast<double>(n) / 2.0) e.offset_bins -= static_cast<double>(n);
      } else {
        base_hz = static_cast<double>(signed_bin(peak.bin, scan_n)) * bin_hz;
        FrontEndSpec spec;
        const std::size_t taps = design_lowpass(block.sample_rate(), rate, spec).size();
        const BasebandBlock narrow = front_end(block, base_hz, rate, spec);
        const std::size_t skip = (taps + decimation - 1) / decimation;
        if (narrow.size() < skip + n * m) {
          fail(Errc::validation, "capture too short for one " + std::string(to_string(detector)) + " decision");
        }
        const auto s = narrow.samples();
        BasebandBlock settled(std::vector<cplx>(s.begin() + static_cast<std::ptrdiff_t>(skip),
                                                s.begin() + static_cast<std::ptrdiff_t>(skip + n * m)),
                              rate);
        e = evaluate(config, detector, settled, std::nullopt);
        if (e.offset_bins > static_cast<double>(n) / 2.0) e.offset_bins -= static_cast<double>(n);
      }
      pd.frequency_hz = center_freq_hz + base_hz + e.offset_bins * bin_hz;

      const CalibrationRecord cal = threshold_for(config, detector, pd.calibration_snr_db, options, store);
      pd.decision = decide(e.statistic, cal.threshold,
                           detector == DetectorKind::scf ? StatisticKind::ta : config.periodogram.statistic,
                           Provenance{cal.target_fa, cal.trials, cal.seed});
      out.push_back(pd);
    }
  }
  return out;
}

std::vector<PeakDecision> detect_file(const std::filesystem::path& iq_path, const ExperimentConfig& config,
                                      const DetectOptions& options, const CalibrationStore& store) {
  const IqCapture capture = read_iq_file(iq_path);
  return detect_block(capture.samples, capture.metadata.center_freq_hz, config, options, store);
}

}  // namespace wmsense::harness
