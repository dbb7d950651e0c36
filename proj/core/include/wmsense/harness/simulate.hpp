#pragma once

#include <cstdint>

#include "wmsense/harness/config.hpp"
#include "wmsense/types.hpp"

namespace wmsense::harness {

enum class Hypothesis { cw, fm };

/// One decision's worth of noisy baseband at the detector's rate: a CW (H0)
/// or Brownian-message FM (H1) emitter with random phase and a carrier offset
/// uniform in [-0.5, 0.5) bins, plus white noise. All randomness comes from
/// `trial_seed`.
BasebandBlock simulate_trial(const ExperimentConfig& config, DetectorKind detector, double snr_db, double beta,
                             Hypothesis hypothesis, std::uint64_t trial_seed);

/// Same emitter without noise, `samples` long, at `sample_rate_hz`, with the
/// carrier at `carrier_hz`.
BasebandBlock simulate_emitter(const ExperimentConfig& config, double sample_rate_hz, std::size_t samples,
                               double snr_db, double beta, Hypothesis hypothesis, double carrier_hz,
                               std::uint64_t seed);

/// Test statistic of `block` for `detector` (T_p / T_p0 or T_a).
double detector_statistic(const ExperimentConfig& config, DetectorKind detector, const BasebandBlock& block);

/// simulate_trial followed by detector_statistic.
double trial_statistic(const ExperimentConfig& config, DetectorKind detector, double snr_db, double beta,
                       Hypothesis hypothesis, std::uint64_t trial_seed);

PeriodogramSettings periodogram_settings(const ExperimentConfig& config);
ScfSettings scf_settings(const ExperimentConfig& config);

}  // namespace wmsense::harness
