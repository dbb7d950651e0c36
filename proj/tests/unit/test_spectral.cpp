#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "wmsense/error.hpp"
#include "wmsense/sigmodel.hpp"
#include "wmsense/spectral.hpp"

using namespace wmsense;

namespace {

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(g(rng), g(rng));
  return x;
}

BasebandBlock tone(double offset_bins, std::size_t n, std::size_t samples, double amplitude = 2.0) {
  SignalParams p;
  p.amplitude = amplitude;
  p.sample_rate_hz = static_cast<double>(n);
  return gen_cw_baseband(p, offset_bins, samples);
}

AveragedPeriodogram from_bins(std::vector<double> bins, double noise) {
  AveragedPeriodogram pg;
  pg.segment_length = bins.size();
  pg.segment_count = 1;
  pg.bins = std::move(bins);
  pg.noise_variance = noise;
  return pg;
}

}  // namespace

TEST_CASE("periodogram examples") {
  std::vector<cplx> impulse(8, 0.0);
  impulse[0] = 1.0;
  for (double v : periodogram(impulse).bins) CHECK(v == doctest::Approx(1.0 / 8.0));

  const auto pg = periodogram(tone(3.0, 16, 16, 2.0).samples());
  for (std::size_t k = 0; k < 16; ++k) CHECK(pg.bins[k] == doctest::Approx(k == 3 ? 16.0 : 0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("periodogram matches the direct DFT and satisfies Parseval") {
  for (std::size_t n : {4u, 7u, 16u, 32u, 64u}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_vector(n, seed * 31 + n);
      const auto fast = periodogram(x).bins;
      const auto slow = oracle::periodogram(x);
      double energy = 0.0;
      for (const auto& v : x) energy += std::norm(v);
      const double total = std::accumulate(fast.begin(), fast.end(), 0.0);
      CHECK(std::abs(total - energy) <= 1e-10 * energy);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) <= 1e-10 * std::max(1.0, slow[k]));
    }
  }
}

TEST_CASE("averaged periodogram") {
  const auto x = random_vector(256, 9);
  const BasebandBlock block(x, 1.0);
  const auto one = averaged_periodogram(block, 64, 1);
  const auto first = periodogram(block.segment(0, 64));
  for (std::size_t k = 0; k < 64; ++k) CHECK(one.bins[k] == doctest::Approx(first.bins[k]));
  CHECK_THROWS_AS(averaged_periodogram(block, 64, 5), Error);

  SUBCASE("noise-only bins are within 5 standard errors of sigma^2") {
    const std::size_t n = 1024;
    const std::size_t m = 1000;
    const BasebandBlock zero(std::vector<cplx>(n * m, 0.0), 1.0);
    const auto pg = averaged_periodogram(add_awgn(zero, 1.0, 77), n, m, 1.0);
    const double se = 1.0 / std::sqrt(static_cast<double>(m));
    for (double v : pg.bins) CHECK(std::abs(v - 1.0) < 5.0 * se);
  }

  SUBCASE("CW at bin 0 with SNR*N = 100") {
    const std::size_t n = 1024;
    const std::size_t m = 400;
    const double snr = 100.0 / static_cast<double>(n);
    const auto clean = tone(0.0, n, n * m, snr_to_amplitude(snr, 1.0));
    const auto pg = averaged_periodogram(add_awgn(clean, 1.0, 5), n, m, 1.0);
    // Var of xi[0] per segment is 2 N snr + 1 = 201.
    CHECK(std::abs(pg.bins[0] - 101.0) < 4.0 * std::sqrt(201.0 / static_cast<double>(m)));
  }
}

TEST_CASE("peak scan") {
  CHECK(peak_scan(from_bins(std::vector<double>(64, 2.0), 2.0), 3.0).peaks.empty());

  std::vector<double> bins(256, 1.0);
  bins[40] = 100.0;
  auto one = peak_scan(from_bins(bins, 1.0), 5.0);
  REQUIRE(one.peaks.size() == 1);
  CHECK(one.peaks[0].bin == 40);

  bins[41] = 30.0;  // same emitter
  bins[200] = 150.0;
  auto two = peak_scan(from_bins(bins, 1.0), 5.0);
  REQUIRE(two.peaks.size() == 2);
  CHECK(two.peaks[0].bin == 200);
  CHECK(two.peaks[1].bin == 40);

  // Run wrapping around bin 0.
  std::vector<double> wrap(64, 1.0);
  wrap[63] = 50.0;
  wrap[0] = 80.0;
  auto w = peak_scan(from_bins(wrap, 1.0), 5.0);
  REQUIRE(w.peaks.size() == 1);
  CHECK(w.peaks[0].bin == 0);
}

TEST_CASE("sad") {
  CHECK(sad(0.0, 64) == doctest::Approx(64.0));
  CHECK(std::abs(sad(1.0 / 8.0, 8)) < 1e-12);
  CHECK(sad(1.0 / 16.0, 8) == doctest::Approx(5.125830895483).epsilon(1e-10));
  for (double z : {0.013, 0.25, 0.49, 0.77}) {
    for (std::size_t n : {7u, 8u, 64u}) {
      CHECK(sad(z, n) == doctest::Approx(sad(-z, n)).epsilon(1e-12));
      CHECK(sad(1.0 + z, n) == doctest::Approx(std::pow(-1.0, n - 1) * sad(z, n)).epsilon(1e-9));
      CHECK(std::abs(sad(z, n)) <= static_cast<double>(n) + 1e-12);
    }
  }
}

TEST_CASE("frequency offset estimation, noise free") {
  const std::size_t n = 256;
  for (double d : {0.0, 0.3, 0.5, 0.77}) {
    const auto pg = averaged_periodogram(tone(10.0 + d, n, n), n, 1, 1e-300);
    const auto est = estimate_frequency_offset(pg);
    CHECK(std::abs(est.bins - (10.0 + d)) < 0.01);
  }
  // Independent grid-search oracle at 1e-4 bins.
  const auto pattern = oracle::leakage_pattern(10.3, n);
  const double grid = oracle::grid_offset(pattern[10], pattern[11], 10, 11, n, 10.0, 11.0, 1e-4);
  const auto est = estimate_frequency_offset(from_bins(pattern, 0.0));
  CHECK(std::abs(est.bins - grid) < 2e-4);
  CHECK(std::abs(est.bins - 10.3) < 0.01);
}

TEST_CASE("estimate -> correct -> estimate shrinks the residual") {
  const std::size_t n = 128;
  for (double d : {0.05, 0.21, 0.5, 0.64, 0.93}) {
    const auto block = tone(d, n, n);
    const auto first = estimate_frequency_offset(averaged_periodogram(block, n, 1, 1e-300));
    const auto corrected = correct_offset(block, bins_to_hz(first.bins, n, block.sample_rate()));
    const auto second = estimate_frequency_offset(averaged_periodogram(corrected, n, 1, 1e-300));
    CHECK(std::abs(second.bins) < std::abs(first.bins));
  }
}

// Statistical contract at the SNR * N = 100 boundary, read as "in at least 95%
// of trials". A no_reliable_offset error counts as an estimate of 0.
TEST_CASE("offset residual at SNR * N = 100") {
  const std::size_t n = 2048;
  const std::size_t m = 15;
  const double noise = static_cast<double>(n) / 100.0;  // unit tone power
  const int trials = 1000;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto estimate = [&](const BasebandBlock& block) {
    try {
      return estimate_frequency_offset(averaged_periodogram(block, n, m)).bins;
    } catch (const Error& e) {
      if (e.code() != Errc::no_reliable_offset) throw;
      return 0.0;
    }
  };
  int residual_ok = 0;
  int on_bin_ok = 0;
  for (int t = 0; t < trials; ++t) {
    const double d = u(rng);
    residual_ok += std::abs(estimate(add_awgn(tone(d, n, n * m), noise, 2 * t)) - d) < 0.05;
    on_bin_ok += std::abs(estimate(add_awgn(tone(0.0, n, n * m), noise, 2 * t + 1))) < 0.02;
  }
  MESSAGE("residual < 0.05 bin in " << residual_ok << "/" << trials << ", on-bin |estimate| < 0.02 in " << on_bin_ok
                                    << "/" << trials);
  CHECK(residual_ok >= 0.95 * trials);
  CHECK(on_bin_ok >= 0.95 * trials);
}

TEST_CASE("offset estimation errors and fallbacks") {
  try {
    estimate_frequency_offset(from_bins(std::vector<double>(32, 1.0), 1.0));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_applicable);
  }
  // Second-largest bin is adjacent but below the noise floor.
  std::vector<double> bins(32, 0.5);
  bins[5] = 50.0;
  bins[6] = 0.9;
  bins[4] = 0.8;
  try {
    estimate_frequency_offset(from_bins(bins, 1.0));
    FAIL("expected no_reliable_offset");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_reliable_offset);
  }
  std::vector<double> split(32, 1.0);
  split[5] = 50.0;
  split[20] = 40.0;
  const auto est = estimate_frequency_offset(from_bins(split, 1.0));
  CHECK(est.low_confidence);
  CHECK(est.bins == doctest::Approx(5.0));
}

TEST_CASE("offset correction") {
  const std::size_t n = 64;
  const auto block = tone(0.0, n, n);
  const auto same = correct_offset(block, 0.0);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(same.samples()[i] - block.samples()[i]) < 1e-15);

  const auto off = correct_offset(tone(3.37, n, n), bins_to_hz(3.37, n, static_cast<double>(n)));
  CHECK(periodogram(off.samples()).bins[0] == doctest::Approx(periodogram(block.samples()).bins[0]).epsilon(1e-8));
  CHECK_THROWS_AS(correct_offset(block, 40.0), Error);
}

TEST_CASE("pipeline on noisy CW puts the peak in bin 0") {
  const std::size_t n = 2048;
  const std::size_t m = 15;
  const double rate = 204800.0;
  const double noise = rate / 8e6;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  int hits = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    SignalParams p;
    p.amplitude = snr_to_amplitude(db_to_linear(-17.0), 1.0);
    p.sample_rate_hz = rate;
    const auto block = add_awgn(gen_cw_baseband(p, u(rng) * rate / n, n * m), noise, 1000 + t);
    const auto pg = averaged_periodogram(block, n, m);
    const auto est = estimate_frequency_offset(pg);
    const auto fixed = averaged_periodogram(correct_offset(block, bins_to_hz(est.bins, n, rate)), n, m);
    hits += std::max_element(fixed.bins.begin(), fixed.bins.end()) == fixed.bins.begin();
  }
  CHECK(hits >= 990);
}

TEST_CASE("noise variance estimation") {
  const std::size_t n = 1024;
  const std::size_t m = 16;
  const BasebandBlock zero(std::vector<cplx>(n * m, 0.0), 1.0);
  for (int t = 0; t < 100; ++t) {
    const auto pg = averaged_periodogram(add_awgn(zero, 1.0, 500 + t), n, m);
    CHECK(pg.noise_estimated);
    CHECK(pg.noise_variance >= 0.97);
    CHECK(pg.noise_variance <= 1.03);
  }
  const auto base = averaged_periodogram(add_awgn(zero, 1.0, 9), n, m);
  auto scaled = base;
  for (double& v : scaled.bins) v *= 3.5;
  const BinWindow excl{0, 8};
  CHECK(estimate_noise_variance(scaled, excl) == doctest::Approx(3.5 * estimate_noise_variance(base, excl)));
  CHECK_THROWS_AS(estimate_noise_variance(base, BinWindow{0, n}), Error);

  // M < 8 path: median-based, still unbiased on average.
  double sum = 0.0;
  for (int t = 0; t < 200; ++t) sum += averaged_periodogram(add_awgn(zero, 2.0, 900 + t), n, 4).noise_variance;
  CHECK(sum / 200.0 == doctest::Approx(2.0).epsilon(0.01));
}

namespace {

double bin_correlation(const std::vector<Periodogram>& segs, std::size_t i, std::size_t j) {
  const double m = static_cast<double>(segs.size());
  double mi = 0.0, mj = 0.0;
  for (const auto& s : segs) {
    mi += s.bins[i];
    mj += s.bins[j];
  }
  mi /= m;
  mj /= m;
  double cij = 0.0, ci = 0.0, cj = 0.0;
  for (const auto& s : segs) {
    cij += (s.bins[i] - mi) * (s.bins[j] - mj);
    ci += (s.bins[i] - mi) * (s.bins[i] - mi);
    cj += (s.bins[j] - mj) * (s.bins[j] - mj);
  }
  return cij / std::sqrt(ci * cj);
}

}  // namespace

// Adjacent bins at M = 1000, then every pair at M = 10000 (the maximum of 120
// sample correlations sits near 3.5 / sqrt(M)).
TEST_CASE("off-diagonal covariance vanishes for large M") {
  const std::size_t n = 16;
  const BasebandBlock small(std::vector<cplx>(n * 1000, 0.0), 1.0);
  const auto segs = segment_periodograms(add_awgn(small, 1.0, 3), n, 1000);
  CHECK(std::abs(bin_correlation(segs, 0, 1)) < 0.1);

  const BasebandBlock large(std::vector<cplx>(n * 10000, 0.0), 1.0);
  const auto many = segment_periodograms(add_awgn(large, 1.0, 4), n, 10000);
  double max_corr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) max_corr = std::max(max_corr, std::abs(bin_correlation(many, i, j)));
  }
  CHECK(max_corr < 0.1);
}
