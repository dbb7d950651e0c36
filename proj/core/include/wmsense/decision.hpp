#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace wmsense {

enum class Verdict { cw, wireless_mic };
enum class StatisticKind { tp, tp0, ta };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(StatisticKind k) noexcept;

struct Provenance {
  double target_fa = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// H1 (wireless microphone) iff statistic > threshold.
struct Decision {
  double statistic = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::cw;
  StatisticKind kind = StatisticKind::tp;
  Provenance provenance;
};

Decision decide(double statistic, double threshold, StatisticKind kind, const Provenance& provenance = {});

/// Threshold leaving round(target_fa * n) of the H0 statistics strictly above
/// it, i.e. the empirical (1 - target_fa) quantile.
double threshold_for_false_alarm(std::vector<double> h0_statistics, double target_fa);

/// Fraction of `statistics` strictly above `threshold`.
double exceedance_rate(std::span<const double> statistics, double threshold);

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_standard_error(double p, std::size_t n);

struct Calibration {
  double threshold = 0.0;
  double target_fa = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// FA measured on a disjoint held-out set of `trials` H0 draws.
  double achieved_fa = 0.0;
};

/// Draws a statistic under H0 from a per-trial seed.
using StatisticGenerator = std::function<double(std::uint64_t trial_seed)>;

/// Monte Carlo threshold calibration. Calibration draws use seeds
/// derive_seed(seed, {0, i}); held-out draws use derive_seed(seed, {1, i}).
/// Throws Errc::invalid_parameter when trials < 10 / target_fa.
Calibration calibrate_threshold(const StatisticGenerator& h0, double target_fa, std::size_t trials,
                                std::uint64_t seed);

/// Runs body(i) for i in [0, count) on the available hardware threads. Each
/// index is executed exactly once; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wmsense
