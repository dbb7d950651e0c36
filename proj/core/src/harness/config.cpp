#include "wmsense/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "wmsense/error.hpp"

namespace wmsense::harness {

using nlohmann::json;

std::string_view to_string(DetectorKind kind) noexcept {
  return kind == DetectorKind::periodogram ? "periodogram" : "scf";
}

DetectorKind parse_detector(std::string_view name) {
  if (name == "periodogram") return DetectorKind::periodogram;
  if (name == "scf") return DetectorKind::scf;
  fail(Errc::validation, "unknown detector '" + std::string(name) + "'");
}

std::vector<DetectorKind> parse_detector_list(std::string_view name) {
  if (name == "both") return {DetectorKind::periodogram, DetectorKind::scf};
  return {parse_detector(name)};
}

std::uint64_t detector_id(DetectorKind kind) noexcept { return kind == DetectorKind::periodogram ? 1 : 2; }

double ExperimentConfig::sample_rate_hz(DetectorKind kind) const noexcept {
  return kind == DetectorKind::periodogram ? periodogram_sample_rate_hz : scf_sample_rate_hz;
}

std::size_t ExperimentConfig::segment_length(DetectorKind kind) const noexcept {
  return kind == DetectorKind::periodogram ? periodogram.segment_length : scf.segment_length;
}

std::size_t ExperimentConfig::segments_per_decision(DetectorKind kind) const noexcept {
  return kind == DetectorKind::periodogram ? periodogram.segment_count : scf.segment_count;
}

double ExperimentConfig::segment_duration_s(DetectorKind kind) const noexcept {
  return static_cast<double>(segment_length(kind)) / sample_rate_hz(kind);
}

std::size_t ExperimentConfig::decision_length(DetectorKind kind) const noexcept {
  return segment_length(kind) * segments_per_decision(kind);
}

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) fail(Errc::validation, what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void ExperimentConfig::validate() const {
  check(!detectors.empty(), "at least one detector is required");
  check(!snr_db.empty(), "snr_db must list at least one value");
  for (double s : snr_db) check(std::isfinite(s), "snr_db values must be finite");
  check(!beta.empty(), "beta must list at least one value");
  for (double b : beta) check(positive_finite(b), "beta values must be positive");
  check(!target_fa.empty(), "target_fa must list at least one value");
  for (double fa : target_fa) check(fa > 0.0 && fa < 1.0, "target_fa values must lie in (0, 1)");
  check(trials >= 1 && calibration_trials >= 1, "trial counts must be >= 1");
  const double min_fa = *std::min_element(target_fa.begin(), target_fa.end());
  check(static_cast<double>(trials) * min_fa >= 10.0 - 1e-9, "trials must be >= 10 / min(target_fa)");
  check(static_cast<double>(calibration_trials) * min_fa >= 10.0 - 1e-9,
        "calibration_trials must be >= 10 / min(target_fa)");

  check(positive_finite(reference_bandwidth_hz), "reference_bandwidth_hz must be positive");
  check(positive_finite(noise_variance), "noise_variance must be positive");
  check(positive_finite(message_step_variance), "message_step_variance must be positive");
  check(positive_finite(scan_threshold_factor) && scan_threshold_factor > 1.0,
        "scan_threshold_factor must exceed 1");

  check(positive_finite(periodogram_sample_rate_hz), "periodogram sample rate must be positive");
  check(periodogram.segment_length >= 2, "periodogram segment_length must be >= 2");
  check(periodogram.segment_count >= 1, "periodogram segments must be >= 1");
  check(periodogram.window >= 1 && periodogram.window <= periodogram.segment_length,
        "periodogram window must lie in [1, N]");
  check(periodogram.statistic != StatisticKind::ta, "periodogram statistic must be tp or tp0");
  check(periodogram.statistic != StatisticKind::tp0 || periodogram.segment_count >= 2,
        "tp0 needs at least two segments");

  check(positive_finite(scf_sample_rate_hz), "scf sample rate must be positive");
  check(scf.segment_length >= 4, "scf segment_length must be >= 4");
  check(scf.segment_count >= 1, "scf segments must be >= 1");
  check(scf.smoothing % 2 == 1 && scf.smoothing <= scf.segment_length, "smoothing must be odd and <= N");
  check(std::isfinite(scf.kappa1) && scf.kappa1 > 0.0, "kappa1 must be positive");
  check(std::isfinite(scf.kappa2) && scf.kappa2 > 0.0, "kappa2 must be positive");
  check(scf.frequency_window >= 1 && scf.cycle_window >= 1, "SCF windows must not be empty");
  check(scf.frequency_window <= scf.segment_length / 2, "psd_window too wide for N");
  check(2 * scf.cycle_window < scf.segment_length, "cycle_window too wide for N");
}

namespace {

std::string_view placement_name(WindowPlacement p) {
  return p == WindowPlacement::first_bins ? "first_bins" : "centered";
}

json detector_list_json(const std::vector<DetectorKind>& detectors) {
  json out = json::array();
  for (DetectorKind d : detectors) out.push_back(std::string(to_string(d)));
  return out;
}

// Applies handlers to the keys of `obj`; unknown keys are rejected.
using Handler = std::function<void(const json&)>;

void visit(const json& obj, const std::string& where, const std::map<std::string, Handler>& handlers) {
  check(obj.is_object(), where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = handlers.find(key);
    check(it != handlers.end(), "unknown key '" + key + "' in " + where);
    try {
      it->second(value);
    } catch (const json::exception& e) {
      fail(Errc::validation, "bad value for '" + key + "' in " + where + ": " + e.what());
    }
  }
}

template <typename T>
Handler set(T& field) {
  return [&field](const json& v) {
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      check(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
            "expected a non-negative integer");
    }
    field = v.get<T>();
  };
}

Handler set_list(std::vector<double>& field) {
  return [&field](const json& v) { field = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()}; };
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return json{
      {"detector", detector_list_json(c.detectors)},
      {"snr_db", c.snr_db},
      {"beta", c.beta},
      {"target_fa", c.target_fa},
      {"trials", c.trials},
      {"calibration_trials", c.calibration_trials},
      {"seed", c.seed},
      {"reference_bandwidth_hz", c.reference_bandwidth_hz},
      {"noise_variance", c.noise_variance},
      {"message_step_variance", c.message_step_variance},
      {"noise_mode", c.noise_mode == NoiseVarianceMode::estimated ? "estimated" : "known"},
      {"scan_threshold_factor", c.scan_threshold_factor},
      {"peak_guard_bins", c.peak_guard_bins},
      {"periodogram",
       {{"sample_rate_hz", c.periodogram_sample_rate_hz},
        {"segment_length", c.periodogram.segment_length},
        {"segment_duration_s", c.segment_duration_s(DetectorKind::periodogram)},
        {"segments", c.periodogram.segment_count},
        {"window", c.periodogram.window},
        {"placement", placement_name(c.periodogram.placement)},
        {"statistic", c.periodogram.statistic == StatisticKind::tp0 ? "tp0" : "tp"},
        {"correct_offset", c.periodogram.correct_offset}}},
      {"scf",
       {{"sample_rate_hz", c.scf_sample_rate_hz},
        {"segment_length", c.scf.segment_length},
        {"segment_duration_s", c.segment_duration_s(DetectorKind::scf)},
        {"segments", c.scf.segment_count},
        {"smoothing", c.scf.smoothing},
        {"kappa1", c.scf.kappa1},
        {"kappa2", c.scf.kappa2},
        {"psd_window", c.scf.frequency_window},
        {"cycle_window", c.scf.cycle_window},
        {"combiner", c.scf.combiner == SegmentCombiner::mean ? "mean" : "median"},
        {"correct_offset", c.scf.correct_offset}}},
  };
}

namespace {

// segment_duration_s is accepted instead of segment_length; it must give an
// integer sample count at the detector's rate.
std::size_t resolve_length(std::size_t length, double duration, bool have_duration, double rate,
                           const std::string& where) {
  if (!have_duration) return length;
  check(positive_finite(duration), where + ".segment_duration_s must be positive");
  const double samples = duration * rate;
  check(std::abs(samples - std::round(samples)) < 1e-6 * std::max(1.0, samples),
        where + ".segment_duration_s must be a whole number of samples");
  const auto n = static_cast<std::size_t>(std::llround(samples));
  check(length == 0 || length == n, where + ": segment_length and segment_duration_s disagree");
  return n;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  std::optional<double> pg_duration;
  std::optional<double> scf_duration;
  bool pg_length_set = false;
  bool scf_length_set = false;

  const std::map<std::string, Handler> periodogram_keys{
      {"sample_rate_hz", set(c.periodogram_sample_rate_hz)},
      {"segment_length", [&](const json& v) { set(c.periodogram.segment_length)(v); pg_length_set = true; }},
      {"segment_duration_s", [&](const json& v) { pg_duration = v.get<double>(); }},
      {"segments", set(c.periodogram.segment_count)},
      {"window", set(c.periodogram.window)},
      {"placement",
       [&](const json& v) {
         const auto s = v.get<std::string>();
         check(s == "first_bins" || s == "centered", "placement must be first_bins or centered");
         c.periodogram.placement = s == "first_bins" ? WindowPlacement::first_bins : WindowPlacement::centered;
       }},
      {"statistic",
       [&](const json& v) {
         const auto s = v.get<std::string>();
         check(s == "tp" || s == "tp0", "periodogram statistic must be tp or tp0");
         c.periodogram.statistic = s == "tp" ? StatisticKind::tp : StatisticKind::tp0;
       }},
      {"correct_offset", set(c.periodogram.correct_offset)},
  };
  const std::map<std::string, Handler> scf_keys{
      {"sample_rate_hz", set(c.scf_sample_rate_hz)},
      {"segment_length", [&](const json& v) { set(c.scf.segment_length)(v); scf_length_set = true; }},
      {"segment_duration_s", [&](const json& v) { scf_duration = v.get<double>(); }},
      {"segments", set(c.scf.segment_count)},
      {"smoothing", set(c.scf.smoothing)},
      {"kappa1", set(c.scf.kappa1)},
      {"kappa2", set(c.scf.kappa2)},
      {"psd_window", set(c.scf.frequency_window)},
      {"cycle_window", set(c.scf.cycle_window)},
      {"combiner",
       [&](const json& v) {
         const auto s = v.get<std::string>();
         check(s == "mean" || s == "median", "combiner must be mean or median");
         c.scf.combiner = s == "mean" ? SegmentCombiner::mean : SegmentCombiner::median;
       }},
      {"correct_offset", set(c.scf.correct_offset)},
  };
  const std::map<std::string, Handler> top_keys{
      {"detector",
       [&](const json& v) {
         if (v.is_string()) {
           c.detectors = parse_detector_list(v.get<std::string>());
         } else {
           c.detectors.clear();
           for (const auto& d : v) c.detectors.push_back(parse_detector(d.get<std::string>()));
         }
       }},
      {"snr_db", set_list(c.snr_db)},
      {"beta", set_list(c.beta)},
      {"target_fa", set_list(c.target_fa)},
      {"trials", set(c.trials)},
      {"calibration_trials", set(c.calibration_trials)},
      {"seed", set(c.seed)},
      {"reference_bandwidth_hz", set(c.reference_bandwidth_hz)},
      {"noise_variance", set(c.noise_variance)},
      {"message_step_variance", set(c.message_step_variance)},
      {"noise_mode",
       [&](const json& v) {
         const auto s = v.get<std::string>();
         check(s == "estimated" || s == "known", "noise_mode must be estimated or known");
         c.noise_mode = s == "estimated" ? NoiseVarianceMode::estimated : NoiseVarianceMode::known;
       }},
      {"scan_threshold_factor", set(c.scan_threshold_factor)},
      {"peak_guard_bins", set(c.peak_guard_bins)},
      {"periodogram", [&](const json& v) { visit(v, "periodogram", periodogram_keys); }},
      {"scf", [&](const json& v) { visit(v, "scf", scf_keys); }},
  };
  visit(doc, "config", top_keys);

  c.periodogram.segment_length =
      resolve_length(pg_length_set ? c.periodogram.segment_length : 0, pg_duration.value_or(0.0),
                     pg_duration.has_value(), c.periodogram_sample_rate_hz, "periodogram");
  if (!pg_length_set && !pg_duration) c.periodogram.segment_length = PeriodogramSettings{}.segment_length;
  c.scf.segment_length = resolve_length(scf_length_set ? c.scf.segment_length : 0, scf_duration.value_or(0.0),
                                        scf_duration.has_value(), c.scf_sample_rate_hz, "scf");
  if (!scf_length_set && !scf_duration) c.scf.segment_length = ScfSettings{}.segment_length;

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::validation, "config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace wmsense::harness
