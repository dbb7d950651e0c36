#include "wmsense/harness/calibration_store.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "wmsense/decision.hpp"
#include "wmsense/error.hpp"
#include "wmsense/rng.hpp"
#include "wmsense/harness/simulate.hpp"

namespace wmsense::harness {

namespace fs = std::filesystem;
using nlohmann::json;

json calibration_fingerprint(const ExperimentConfig& config, DetectorKind detector, double snr_db) {
  const json full = to_json(config);
  json fp{
      {"detector", std::string(to_string(detector))},
      {"snr_db", snr_db},
      {"reference_bandwidth_hz", config.reference_bandwidth_hz},
      {"noise_variance", config.noise_variance},
      {"noise_mode", full["noise_mode"]},
      {"calibration_trials", config.calibration_trials},
  };
  fp["settings"] = full[std::string(to_string(detector))];
  fp["settings"].erase("segment_duration_s");
  return fp;
}

json to_json(const CalibrationRecord& r) {
  return json{{"detector", std::string(to_string(r.detector))},
              {"fingerprint", r.fingerprint},
              {"target_fa", r.target_fa},
              {"gamma", r.threshold},
              {"trials", r.trials},
              {"seed", r.seed},
              {"achieved_fa", r.achieved_fa},
              {"created", r.created}};
}

CalibrationRecord record_from_json(const json& doc) {
  try {
    CalibrationRecord r;
    r.detector = parse_detector(doc.at("detector").get<std::string>());
    r.fingerprint = doc.at("fingerprint");
    r.target_fa = doc.at("target_fa").get<double>();
    r.threshold = doc.at("gamma").get<double>();
    r.trials = doc.at("trials").get<std::size_t>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.achieved_fa = doc.value("achieved_fa", 0.0);
    r.created = doc.value("created", std::string{});
    return r;
  } catch (const json::exception& e) {
    fail(Errc::io, std::string("malformed calibration record: ") + e.what());
  }
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json record_key(const json& fingerprint, double target_fa, std::size_t trials, std::uint64_t seed) {
  return json{{"fingerprint", fingerprint}, {"target_fa", target_fa}, {"trials", trials}, {"seed", seed}};
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

CalibrationStore::CalibrationStore(fs::path directory) : directory_(std::move(directory)) {}

CalibrationStore CalibrationStore::from_environment() {
  if (const char* dir = env(calibration_dir_env)) return CalibrationStore(dir);
  if (const char* xdg = env("XDG_CACHE_HOME")) return CalibrationStore(fs::path(xdg) / "wmsense" / "calibration");
  if (const char* home = env("HOME")) return CalibrationStore(fs::path(home) / ".cache" / "wmsense" / "calibration");
  return CalibrationStore(".wmsense-calibration");
}

fs::path CalibrationStore::record_path(const json& fingerprint, double target_fa, std::size_t trials,
                                       std::uint64_t seed) const {
  char name[40];
  std::snprintf(name, sizeof name, "%016llx.json",
                static_cast<unsigned long long>(fnv1a(record_key(fingerprint, target_fa, trials, seed).dump())));
  return directory_ / name;
}

std::optional<CalibrationRecord> CalibrationStore::find(const json& fingerprint, double target_fa,
                                                        std::size_t trials, std::uint64_t seed) const {
  const fs::path path = record_path(fingerprint, target_fa, trials, seed);
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    if (ec) fail(Errc::io, "cannot access calibration store '" + directory_.string() + "': " + ec.message());
    return std::nullopt;
  }
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot read calibration record '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::io, "calibration record '" + path.string() + "' is not valid JSON: " + e.what());
  }
  CalibrationRecord r = record_from_json(doc);
  if (r.fingerprint != fingerprint || r.target_fa != target_fa || r.trials != trials || r.seed != seed) {
    return std::nullopt;
  }
  return r;
}

void CalibrationStore::save(const CalibrationRecord& record) const {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) fail(Errc::io, "cannot create calibration directory '" + directory_.string() + "': " + ec.message());
  const fs::path path = record_path(record.fingerprint, record.target_fa, record.trials, record.seed);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write calibration record '" + tmp.string() + "'");
    out << to_json(record).dump(2) << '\n';
    if (!out) fail(Errc::io, "failed writing calibration record '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "cannot move calibration record into place: " + ec.message());
}

std::uint64_t calibration_seed(const ExperimentConfig& config, DetectorKind detector) noexcept {
  return derive_seed(config.seed, {detector_id(detector), 16});
}

CalibrationResult calibrate(const ExperimentConfig& config, DetectorKind detector, double snr_db, double target_fa,
                            const CalibrationStore& store) {
  config.validate();
  if (!(target_fa > 0.0 && target_fa < 1.0)) fail(Errc::validation, "target FA must lie in (0, 1)");
  const json fp = calibration_fingerprint(config, detector, snr_db);
  const std::uint64_t seed = calibration_seed(config, detector);
  if (auto hit = store.find(fp, target_fa, config.calibration_trials, seed)) return {*hit, true};

  const double beta = config.beta.front();
  Calibration cal;
  try {
    cal = calibrate_threshold(
        [&](std::uint64_t s) { return trial_statistic(config, detector, snr_db, beta, Hypothesis::cw, s); },
        target_fa, config.calibration_trials, seed);
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_parameter) fail(Errc::validation, e.what());
    throw;
  }
  CalibrationRecord r;
  r.detector = detector;
  r.fingerprint = fp;
  r.target_fa = target_fa;
  r.threshold = cal.threshold;
  r.trials = cal.trials;
  r.seed = seed;
  r.achieved_fa = cal.achieved_fa;
  r.created = utc_now();
  store.save(r);
  return {r, false};
}

}  // namespace wmsense::harness
