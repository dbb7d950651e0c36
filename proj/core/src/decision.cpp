#include "wmsense/decision.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wmsense/error.hpp"
#include "wmsense/rng.hpp"

namespace wmsense {

std::string_view to_string(Verdict v) noexcept {
  return v == Verdict::cw ? "H0_CW" : "H1_WirelessMic";
}

std::string_view to_string(StatisticKind k) noexcept {
  switch (k) {
    case StatisticKind::tp: return "Tp";
    case StatisticKind::tp0: return "Tp0";
    case StatisticKind::ta: return "Ta";
  }
  return "?";
}

Decision decide(double statistic, double threshold, StatisticKind kind, const Provenance& provenance) {
  Decision d;
  d.statistic = statistic;
  d.threshold = threshold;
  d.verdict = statistic > threshold ? Verdict::wireless_mic : Verdict::cw;
  d.kind = kind;
  d.provenance = provenance;
  return d;
}

double threshold_for_false_alarm(std::vector<double> h0_statistics, double target_fa) {
  require(!h0_statistics.empty(), Errc::invalid_parameter, "no H0 statistics");
  require(target_fa > 0.0 && target_fa < 1.0, Errc::invalid_parameter, "target FA must lie in (0, 1)");
  const std::size_t n = h0_statistics.size();
  const auto above = static_cast<std::size_t>(std::llround(target_fa * static_cast<double>(n)));
  require(above < n, Errc::invalid_parameter, "too few trials for the target FA");
  std::sort(h0_statistics.begin(), h0_statistics.end());
  return h0_statistics[n - above - 1];
}

double exceedance_rate(std::span<const double> statistics, double threshold) {
  if (statistics.empty()) return 0.0;
  const auto count = std::count_if(statistics.begin(), statistics.end(), [&](double s) { return s > threshold; });
  return static_cast<double>(count) / static_cast<double>(statistics.size());
}

double binomial_standard_error(double p, std::size_t n) {
  require(n > 0, Errc::invalid_parameter, "binomial standard error needs n > 0");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

Calibration calibrate_threshold(const StatisticGenerator& h0, double target_fa, std::size_t trials,
                                std::uint64_t seed) {
  require(target_fa > 0.0 && target_fa < 1.0, Errc::invalid_parameter, "target FA must lie in (0, 1)");
  if (static_cast<double>(trials) < 10.0 / target_fa) {
    fail(Errc::invalid_parameter, "calibration needs at least 10 / target_fa trials");
  }
  std::vector<double> calibration(trials);
  std::vector<double> held_out(trials);
  parallel_for(trials, [&](std::size_t i) {
    calibration[i] = h0(derive_seed(seed, {0, i}));
    held_out[i] = h0(derive_seed(seed, {1, i}));
  });
  Calibration c;
  c.threshold = threshold_for_false_alarm(calibration, target_fa);
  c.target_fa = target_fa;
  c.trials = trials;
  c.seed = seed;
  c.achieved_fa = exceedance_rate(held_out, c.threshold);
  return c;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1U, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace wmsense
