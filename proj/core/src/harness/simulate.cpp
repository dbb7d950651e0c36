#include "wmsense/harness/simulate.hpp"

#include <numbers>
#include <random>

#include "wmsense/error.hpp"
#include "wmsense/rng.hpp"
#include "wmsense/sigmodel.hpp"

namespace wmsense::harness {

namespace {

double per_sample_noise(const ExperimentConfig& config, double rate) {
  return config.noise_variance * rate / config.reference_bandwidth_hz;
}

}  // namespace

PeriodogramSettings periodogram_settings(const ExperimentConfig& config) {
  PeriodogramSettings s = config.periodogram;
  s.known_noise_variance.reset();
  if (config.noise_mode == NoiseVarianceMode::known) {
    s.known_noise_variance = per_sample_noise(config, config.periodogram_sample_rate_hz);
  }
  return s;
}

ScfSettings scf_settings(const ExperimentConfig& config) {
  ScfSettings s = config.scf;
  s.known_noise_variance.reset();
  if (config.noise_mode == NoiseVarianceMode::known) {
    s.known_noise_variance = per_sample_noise(config, config.scf_sample_rate_hz);
  }
  return s;
}

BasebandBlock simulate_emitter(const ExperimentConfig& config, double sample_rate_hz, std::size_t samples,
                               double snr_db, double beta, Hypothesis hypothesis, double carrier_hz,
                               std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0}));
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);

  SignalParams p;
  p.amplitude = snr_to_amplitude(db_to_linear(snr_db), config.noise_variance);
  p.phase = phase_dist(rng);
  p.freq_deviation = beta;
  p.noise_variance = config.noise_variance;
  p.sample_rate_hz = sample_rate_hz;
  p.reference_bandwidth_hz = config.reference_bandwidth_hz;
  p.carrier_freq_hz = carrier_hz;

  if (hypothesis == Hypothesis::cw) return gen_cw_baseband(p, carrier_hz, samples);
  const double step = config.message_step_variance * config.reference_bandwidth_hz / sample_rate_hz;
  const MessageTrace message = gen_brownian_message(samples, step, derive_seed(seed, {1}));
  return shift_frequency(gen_fm_baseband(p, message, samples), carrier_hz);
}

BasebandBlock simulate_trial(const ExperimentConfig& config, DetectorKind detector, double snr_db, double beta,
                             Hypothesis hypothesis, std::uint64_t trial_seed) {
  const double rate = config.sample_rate_hz(detector);
  const double bin_hz = rate / static_cast<double>(config.segment_length(detector));
  Rng rng(derive_seed(trial_seed, {3}));
  const double offset = std::uniform_real_distribution<double>(-0.5, 0.5)(rng) * bin_hz;
  const BasebandBlock clean = simulate_emitter(config, rate, config.decision_length(detector), snr_db, beta,
                                               hypothesis, offset, trial_seed);
  return add_awgn(clean, per_sample_noise(config, rate), derive_seed(trial_seed, {2}));
}

double detector_statistic(const ExperimentConfig& config, DetectorKind detector, const BasebandBlock& block) {
  if (detector == DetectorKind::periodogram) return evaluate_periodogram(block, periodogram_settings(config)).statistic;
  return evaluate_scf(block, scf_settings(config)).ta.value;
}

double trial_statistic(const ExperimentConfig& config, DetectorKind detector, double snr_db, double beta,
                       Hypothesis hypothesis, std::uint64_t trial_seed) {
  return detector_statistic(config, detector,
                            simulate_trial(config, detector, snr_db, beta, hypothesis, trial_seed));
}

}  // namespace wmsense::harness
