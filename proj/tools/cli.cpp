#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "wmsense/error.hpp"
#include "wmsense/rng.hpp"
#include "wmsense/sigmodel.hpp"
#include "wmsense/harness/calibration_store.hpp"
#include "wmsense/harness/config.hpp"
#include "wmsense/harness/detect.hpp"
#include "wmsense/harness/iq_file.hpp"
#include "wmsense/harness/roc.hpp"
#include "wmsense/harness/simulate.hpp"
#include "wmsense/harness/surface.hpp"

namespace wmsense::cli {

namespace {

using namespace wmsense::harness;

// Flags shared by the subcommands that build an ExperimentConfig.
struct ConfigFlags {
  std::string config_path;
  bool print_config = false;
  std::optional<std::uint64_t> seed;
  std::string detector;
  std::vector<double> snr_db;
  std::vector<double> beta;
  std::vector<double> fa;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> calibration_trials;
  std::optional<std::size_t> window;
  std::string noise_mode;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_flag("--print-config", print_config, "Print the resolved config and exit");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--snr", snr_db, "SNR list in dB");
    app.add_option("--beta", beta, "Frequency deviation list");
    app.add_option("--trials", trials, "Held-out H0 and H1 trials per cell");
    app.add_option("--calibration-trials", calibration_trials, "H0 trials used to set each threshold");
    app.add_option("--window", window, "Periodogram window length L");
    app.add_option("--noise-mode", noise_mode, "estimated or known");
  }

  ExperimentConfig resolve() const {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) doc = to_json(load_config(config_path));
    if (!detector.empty()) doc["detector"] = detector;
    if (!snr_db.empty()) doc["snr_db"] = snr_db;
    if (!beta.empty()) doc["beta"] = beta;
    if (!fa.empty()) doc["target_fa"] = fa;
    if (seed) doc["seed"] = *seed;
    if (trials) doc["trials"] = *trials;
    if (calibration_trials) {
      doc["calibration_trials"] = *calibration_trials;
    } else if (trials && !doc.contains("calibration_trials")) {
      doc["calibration_trials"] = *trials;
    }
    if (window) doc["periodogram"]["window"] = *window;
    if (!noise_mode.empty()) doc["noise_mode"] = noise_mode;
    return config_from_json(doc);
  }
};

std::ostream* open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder, std::ostream& fallback) {
  if (path.empty() || path == "-") return &fallback;
  holder = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*holder) fail(Errc::io, "cannot write '" + path + "'");
  return holder.get();
}

void finish(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os) fail(Errc::io, "failed writing '" + path + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int exit_code(Errc code) { return code == Errc::io ? 2 : 1; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wireless-microphone vs CW interference detection"};
  app.require_subcommand(1);

  // roc
  ConfigFlags roc_flags;
  std::string roc_out;
  std::string roc_stats_out;
  auto* roc = app.add_subcommand("roc", "Monte Carlo ROC table (CSV)");
  roc_flags.attach(*roc);
  roc->add_option("--detector", roc_flags.detector, "periodogram, scf or both");
  roc->add_option("--fa", roc_flags.fa, "Target false-alarm rates");
  roc->add_option("--out", roc_out, "Output CSV (default stdout)");
  roc->add_option("--stats-out", roc_stats_out, "Per-trial statistics CSV");

  // calibrate
  ConfigFlags cal_flags;
  double cal_fa = 0.05;
  auto* cal = app.add_subcommand("calibrate", "Calibrate and store a detection threshold");
  cal_flags.attach(*cal);
  cal->add_option("--detector", cal_flags.detector, "periodogram, scf or both");
  cal->add_option("--fa", cal_fa, "Target false-alarm rate")->default_val(0.05);

  // detect
  ConfigFlags det_flags;
  std::string det_iq;
  double det_fa = 0.05;
  bool det_no_auto = false;
  std::string det_out;
  auto* det = app.add_subcommand("detect", "Classify emitters in an IQ capture");
  det_flags.attach(*det);
  det->add_option("--iq", det_iq, "cf32le capture with .meta.json sidecar")->required();
  det->add_option("--detector", det_flags.detector, "periodogram, scf or both");
  det->add_option("--fa", det_fa, "Target false-alarm rate")->default_val(0.05);
  det->add_flag("--no-auto-calibrate", det_no_auto, "Fail when no stored calibration matches");
  det->add_option("--out", det_out, "Output CSV (default stdout)");

  // scf-surface
  ConfigFlags surf_flags;
  std::string surf_iq;
  std::string surf_synthetic;
  std::string surf_alpha = "-20:21";
  std::string surf_f = "-20:21";
  std::string surf_out;
  SyntheticSurfaceSpec synth_spec;
  auto* surf = app.add_subcommand("scf-surface", "Augmented SCF surface (CSV)");
  surf_flags.attach(*surf);
  auto* iq_opt = surf->add_option("--iq", surf_iq, "cf32le capture");
  auto* syn_opt = surf->add_option("--synthetic", surf_synthetic, "cw or fm (noise-free)");
  iq_opt->excludes(syn_opt);
  surf->add_option("--alpha-range", surf_alpha, "Half-open alpha bin range lo:hi")->default_val("-20:21");
  surf->add_option("--f-range", surf_f, "Half-open frequency bin range lo:hi")->default_val("-20:21");
  surf->add_option("--out", surf_out, "Output CSV (default stdout)");
  surf->add_option("--segment-length", synth_spec.segment_length, "Synthetic frame length")->default_val(256);
  surf->add_option("--half-bandwidth", synth_spec.half_bandwidth, "Synthetic FM half bandwidth in bins")->default_val(4);

  // synth
  ConfigFlags syn_flags;
  std::string syn_out;
  std::string syn_signal = "fm";
  double syn_offset = 0.0;
  double syn_center = 0.0;
  std::optional<double> syn_rate;
  std::optional<std::size_t> syn_samples;
  auto* syn = app.add_subcommand("synth", "Write a synthetic IQ capture");
  syn_flags.attach(*syn);
  syn->add_option("--detector", syn_flags.detector, "Detector whose rate and length are used");
  syn->add_option("--out", syn_out, "Output .cf32 path")->required();
  syn->add_option("--signal", syn_signal, "cw, fm or noise")->default_val("fm");
  syn->add_option("--offset-hz", syn_offset, "Emitter offset from the capture centre");
  syn->add_option("--center-hz", syn_center, "Capture centre frequency written to the sidecar");
  syn->add_option("--rate", syn_rate, "Capture sample rate (default: detector rate)");
  syn->add_option("--samples", syn_samples, "Capture length (default: one decision)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*roc) {
      const ExperimentConfig config = roc_flags.resolve();
      if (roc_flags.print_config) {
        out << to_json(config).dump(2) << '\n';
        return 0;
      }
      std::vector<CellStatistics> stats;
      const RocTable table = run_roc(config, roc_stats_out.empty() ? nullptr : &stats);
      std::unique_ptr<std::ofstream> file;
      std::ostream* os = open_output(roc_out, file, out);
      write_roc_csv(*os, table);
      finish(*os, roc_out);
      if (!roc_stats_out.empty()) {
        std::ofstream sf(roc_stats_out, std::ios::trunc);
        if (!sf) fail(Errc::io, "cannot write '" + roc_stats_out + "'");
        write_statistics_csv(sf, stats);
        finish(sf, roc_stats_out);
      }
      return 0;
    }

    if (*cal) {
      cal_flags.fa = {cal_fa};
      ExperimentConfig config = cal_flags.resolve();
      if (cal_flags.print_config) {
        out << to_json(config).dump(2) << '\n';
        return 0;
      }
      const CalibrationStore store = CalibrationStore::from_environment();
      for (DetectorKind d : config.detectors) {
        for (double snr : config.snr_db) {
          const CalibrationResult r = calibrate(config, d, snr, cal_fa, store);
          nlohmann::json j = to_json(r.record);
          j["cache_hit"] = r.cache_hit;
          j["path"] = store.record_path(r.record.fingerprint, r.record.target_fa, r.record.trials, r.record.seed).string();
          out << j.dump() << '\n';
        }
      }
      return 0;
    }

    if (*det) {
      det_flags.fa = {det_fa};
      const ExperimentConfig config = det_flags.resolve();
      if (det_flags.print_config) {
        out << to_json(config).dump(2) << '\n';
        return 0;
      }
      DetectOptions options;
      options.detectors = config.detectors;
      options.target_fa = det_fa;
      options.auto_calibrate = !det_no_auto;
      const auto decisions = detect_file(det_iq, config, options, CalibrationStore::from_environment());
      std::unique_ptr<std::ofstream> file;
      std::ostream* os = open_output(det_out, file, out);
      *os << "detector,frequency_hz,peak_bin,snr_db_estimate,statistic,threshold,verdict\n";
      for (const PeakDecision& d : decisions) {
        *os << to_string(d.detector) << ',' << fmt(d.frequency_hz) << ',' << d.peak_bin << ','
            << fmt(d.snr_db_estimate) << ',' << fmt(d.decision.statistic) << ',' << fmt(d.decision.threshold) << ','
            << to_string(d.decision.verdict) << '\n';
      }
      finish(*os, det_out);
      return 0;
    }

    if (*surf) {
      const ExperimentConfig config = surf_flags.resolve();
      if (surf_flags.print_config) {
        out << to_json(config).dump(2) << '\n';
        return 0;
      }
      if (surf_iq.empty() == surf_synthetic.empty()) fail(Errc::validation, "give exactly one of --iq or --synthetic");
      const SurfaceGrid grid{parse_range(surf_alpha), parse_range(surf_f)};
      std::optional<SpectrumFrame> frame;
      if (!surf_synthetic.empty()) {
        synth_spec.kind = parse_synthetic_kind(surf_synthetic);
        synth_spec.smoothing = config.scf.smoothing;
        synth_spec.seed = config.seed;
        frame.emplace(synthetic_frame(synth_spec));
      } else {
        frame.emplace(capture_frame(read_iq_file(surf_iq).samples, config.scf));
      }
      std::unique_ptr<std::ofstream> file;
      std::ostream* os = open_output(surf_out, file, out);
      write_scf_surface(*os, *frame, config.scf.kappa1, config.scf.kappa2, grid);
      finish(*os, surf_out);
      return 0;
    }

    if (*syn) {
      const ExperimentConfig config = syn_flags.resolve();
      if (syn_flags.print_config) {
        out << to_json(config).dump(2) << '\n';
        return 0;
      }
      const DetectorKind d = config.detectors.front();
      const double rate = syn_rate.value_or(config.sample_rate_hz(d));
      if (!(rate > 0.0)) fail(Errc::validation, "--rate must be positive");
      const double ratio = rate / config.sample_rate_hz(d);
      const std::size_t samples =
          syn_samples.value_or(static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(config.decision_length(d)))));
      if (syn_signal != "cw" && syn_signal != "fm" && syn_signal != "noise") {
        fail(Errc::validation, "--signal must be cw, fm or noise");
      }
      const std::uint64_t seed = config.seed;
      BasebandBlock clean(std::vector<cplx>(samples, cplx(0.0, 0.0)), rate);
      if (syn_signal != "noise") {
        clean = simulate_emitter(config, rate, samples, config.snr_db.front(), config.beta.front(),
                                 syn_signal == "cw" ? Hypothesis::cw : Hypothesis::fm, syn_offset, seed);
      }
      const double noise = config.noise_variance * rate / config.reference_bandwidth_hz;
      write_iq_file(syn_out, add_awgn(clean, noise, derive_seed(seed, {2})), syn_center);
      return 0;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace wmsense::cli
