#include "wmsense/spectral.hpp"

#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "wmsense/error.hpp"
#include "wmsense/sigmodel.hpp"

namespace wmsense {

namespace {

double median_of(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  }
  return m;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n) {
  const std::size_t d = a > b ? a - b : b - a;
  return std::min(d, n - d);
}

double signed_bin(double bin, std::size_t n) {
  const double half = static_cast<double>(n) / 2.0;
  double b = std::fmod(bin, static_cast<double>(n));
  if (b > half) b -= static_cast<double>(n);
  if (b <= -half) b += static_cast<double>(n);
  return b;
}

// log(sad^2) as a function of the tone position `tone` (bins) relative to bin k.
double log_sad_squared(double tone, double k, std::size_t n) {
  const double s = sad((tone - k) / static_cast<double>(n), n);
  return 2.0 * std::log(std::abs(s));
}

OffsetEstimate solve_two_bin(const AveragedPeriodogram& pg, std::size_t k1, std::size_t k2) {
  const std::size_t n = pg.segment_length;
  OffsetEstimate est;
  est.peak_bin = k1;

  std::size_t lower = 0;
  if ((k1 + 1) % n == k2) {
    lower = k1;
  } else if ((k2 + 1) % n == k1) {
    lower = k2;
  } else {
    est.bins = signed_bin(static_cast<double>(k1), n);
    est.low_confidence = true;
    return est;
  }
  const std::size_t upper = (lower + 1) % n;

  const double s2 = pg.noise_variance;
  const double excess_lower = pg.bins[lower] - s2;
  const double excess_upper = pg.bins[upper] - s2;
  if (!(excess_lower > 0.0) || !(excess_upper > 0.0)) {
    fail(Errc::no_reliable_offset, "second-largest bin does not exceed the noise level");
  }
  const double target = std::log(excess_lower / excess_upper);

  // Positions are measured from `lower`; the residual falls monotonically
  // from +inf to -inf over (0, 1).
  auto residual = [&](double t) {
    return log_sad_squared(t, 0.0, n) - log_sad_squared(t, 1.0, n) - target;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 60 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.bins = signed_bin(static_cast<double>(lower) + 0.5 * (lo + hi), n);
  return est;
}

void require_dominant_peak(const AveragedPeriodogram& pg, std::size_t k) {
  const double med = median_of(pg.bins);
  if (!(pg.bins[k] >= 2.0 * med)) {
    fail(Errc::not_applicable, "averaged periodogram has no dominant peak");
  }
}

}  // namespace

Periodogram periodogram(std::span<const cplx> segment) {
  const std::size_t n = segment.size();
  require(n >= 2, Errc::invalid_parameter, "periodogram needs a segment of length >= 2");
  std::vector<cplx> spectrum(n);
  detail::forward_dft(segment, spectrum);
  Periodogram pg{std::vector<double>(n)};
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) pg.bins[k] = std::norm(spectrum[k]) * scale;
  return pg;
}

std::vector<Periodogram> segment_periodograms(const BasebandBlock& block, std::size_t segment_length,
                                              std::size_t segment_count) {
  require(segment_length >= 2 && segment_count >= 1, Errc::invalid_parameter,
          "need N >= 2 and M >= 1");
  require(block.size() >= segment_length * segment_count, Errc::invalid_parameter,
          "block shorter than M * N samples");
  std::vector<Periodogram> out;
  out.reserve(segment_count);
  for (std::size_t m = 0; m < segment_count; ++m) out.push_back(periodogram(block.segment(m, segment_length)));
  return out;
}

AveragedPeriodogram average(std::span<const Periodogram> segments, std::optional<double> known_noise_variance) {
  require(!segments.empty(), Errc::invalid_parameter, "no segments to average");
  const std::size_t n = segments.front().segment_length();
  AveragedPeriodogram avg;
  avg.bins.assign(n, 0.0);
  avg.segment_length = n;
  avg.segment_count = segments.size();
  for (const Periodogram& p : segments) {
    require(p.segment_length() == n, Errc::invalid_parameter, "segment lengths differ");
    for (std::size_t k = 0; k < n; ++k) avg.bins[k] += p.bins[k];
  }
  const double inv = 1.0 / static_cast<double>(segments.size());
  for (double& v : avg.bins) v *= inv;

  if (known_noise_variance) {
    require(*known_noise_variance >= 0.0, Errc::invalid_parameter, "noise variance must be >= 0");
    avg.noise_variance = *known_noise_variance;
    avg.noise_estimated = false;
  } else {
    const BinWindow exclusion{argmax(avg.bins), default_exclusion_half_width(n)};
    avg.noise_variance = estimate_noise_variance(avg, exclusion);
    avg.noise_estimated = true;
  }
  return avg;
}

AveragedPeriodogram averaged_periodogram(const BasebandBlock& block, std::size_t segment_length,
                                         std::size_t segment_count, std::optional<double> known_noise_variance) {
  const auto segments = segment_periodograms(block, segment_length, segment_count);
  return average(segments, known_noise_variance);
}

PeakList peak_scan(const AveragedPeriodogram& pg, double threshold_factor) {
  require(threshold_factor > 1.0, Errc::invalid_parameter, "threshold factor must exceed 1");
  const std::size_t n = pg.bins.size();
  PeakList list;
  list.threshold = threshold_factor * median_of(pg.bins);
  auto above = [&](std::size_t k) { return pg.bins[k] > list.threshold; };

  // Start the sweep on a sub-threshold bin so runs that wrap around bin 0
  // are seen as one run.
  std::size_t start = 0;
  while (start < n && above(start)) ++start;
  if (start == n) {
    list.peaks.push_back({argmax(pg.bins), pg.bins[argmax(pg.bins)]});
    return list;
  }
  std::optional<Peak> run;
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t k = (start + step) % n;
    if (above(k)) {
      if (!run || pg.bins[k] > run->power) {
        if (!run) run.emplace();
        run->bin = k;
        run->power = pg.bins[k];
      }
    } else if (run) {
      list.peaks.push_back(*run);
      run.reset();
    }
  }
  std::sort(list.peaks.begin(), list.peaks.end(), [](const Peak& a, const Peak& b) {
    return a.power > b.power || (a.power == b.power && a.bin < b.bin);
  });
  return list;
}

double sad(double zeta, std::size_t segment_length) {
  const double n = static_cast<double>(segment_length);
  const double m = std::round(zeta);
  const double d = zeta - m;
  // sin(pi N (m + d)) / sin(pi (m + d)) = (-1)^(m (N - 1)) sin(pi N d) / sin(pi d)
  const long long parity = static_cast<long long>(m) * static_cast<long long>(segment_length - 1);
  const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
  if (d == 0.0) return sign * n;
  return sign * std::sin(std::numbers::pi * n * d) / std::sin(std::numbers::pi * d);
}

OffsetEstimate estimate_frequency_offset(const AveragedPeriodogram& pg) {
  const std::size_t n = pg.bins.size();
  require(n >= 2, Errc::invalid_parameter, "periodogram too short");
  std::size_t k1 = 0;
  std::size_t k2 = 1;
  if (pg.bins[k2] > pg.bins[k1]) std::swap(k1, k2);
  for (std::size_t k = 2; k < n; ++k) {
    if (pg.bins[k] > pg.bins[k1]) {
      k2 = k1;
      k1 = k;
    } else if (pg.bins[k] > pg.bins[k2]) {
      k2 = k;
    }
  }
  require_dominant_peak(pg, k1);
  return solve_two_bin(pg, k1, k2);
}

OffsetEstimate estimate_frequency_offset(const AveragedPeriodogram& pg, std::size_t peak_bin) {
  const std::size_t n = pg.bins.size();
  require(peak_bin < n, Errc::invalid_parameter, "peak bin out of range");
  std::size_t k1 = peak_bin;
  const std::size_t left = (peak_bin + n - 1) % n;
  const std::size_t right = (peak_bin + 1) % n;
  // Largest of the three, then its larger neighbour.
  for (std::size_t k : {left, right}) {
    if (pg.bins[k] > pg.bins[k1]) k1 = k;
  }
  const std::size_t a = (k1 + n - 1) % n;
  const std::size_t b = (k1 + 1) % n;
  const std::size_t k2 = pg.bins[a] > pg.bins[b] ? a : b;
  require_dominant_peak(pg, k1);
  return solve_two_bin(pg, k1, k2);
}

BasebandBlock correct_offset(const BasebandBlock& block, double offset_hz) {
  require(std::abs(offset_hz) < block.sample_rate() / 2.0, Errc::invalid_parameter,
          "offset correction beyond the Nyquist band");
  if (offset_hz == 0.0) return block;
  return shift_frequency(block, -offset_hz);
}

double bins_to_hz(double bins, std::size_t segment_length, double sample_rate_hz) noexcept {
  return bins * sample_rate_hz / static_cast<double>(segment_length);
}

std::size_t default_exclusion_half_width(std::size_t segment_length) noexcept {
  return std::max<std::size_t>(8, segment_length / 32);
}

double estimate_noise_variance(const AveragedPeriodogram& pg, BinWindow exclusion) {
  const std::size_t n = pg.bins.size();
  require(n >= 2 && exclusion.center < n, Errc::invalid_parameter, "exclusion centre out of range");
  require(2 * exclusion.half_width + 1 < n, Errc::invalid_parameter, "exclusion window covers every bin");
  require(pg.segment_count >= 1, Errc::invalid_parameter, "segment count must be >= 1");

  std::vector<double> kept;
  kept.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (circular_distance(k, exclusion.center, n) > exclusion.half_width) kept.push_back(pg.bins[k]);
  }

  const double m = static_cast<double>(pg.segment_count);
  const boost::math::gamma_distribution<double> noise_bin(m, 1.0 / m);
  if (pg.segment_count >= 8) {
    constexpr double keep_fraction = 0.9;
    std::sort(kept.begin(), kept.end());
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(keep_fraction * kept.size()));
    const double trimmed = std::accumulate(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(count), 0.0) /
                           static_cast<double>(count);
    // E[X | X < q] for X ~ Gamma(M, 1/M) equals P(Gamma(M+1, 1/M) < q) / P(X < q).
    const double q = boost::math::quantile(noise_bin, keep_fraction);
    const double expected = boost::math::cdf(boost::math::gamma_distribution<double>(m + 1.0, 1.0 / m), q) /
                            keep_fraction;
    return trimmed / expected;
  }
  return median_of(std::move(kept)) / boost::math::median(noise_bin);
}

}  // namespace wmsense
