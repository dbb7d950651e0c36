// Acceptance criteria runner. `acceptance` runs every criterion; `acceptance 3 7`
// runs a subset. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wmsense/decision.hpp"
#include "wmsense/error.hpp"
#include "wmsense/periodogram_detector.hpp"
#include "wmsense/rng.hpp"
#include "wmsense/scf_detector.hpp"
#include "wmsense/sigmodel.hpp"
#include "wmsense/spectral.hpp"
#include "wmsense/harness/config.hpp"
#include "wmsense/harness/roc.hpp"
#include "wmsense/harness/simulate.hpp"

using namespace wmsense;
using namespace wmsense::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr std::uint64_t kSeed = 20150601;

ExperimentConfig base(DetectorKind d) {
  ExperimentConfig c;
  c.detectors = {d};
  c.trials = 2000;
  c.calibration_trials = 2000;
  c.target_fa = {0.05};
  c.seed = kSeed;
  return c;
}

const RocRow& row(const RocTable& t, double beta, double fa) {
  for (const auto& r : t.rows) {
    if (r.beta == beta && r.target_fa == fa) return r;
  }
  throw std::runtime_error("missing ROC row");
}

std::string rates(const RocRow& r) {
  return "Pd=" + fmt("%.4f", r.detection_rate) + " FA=" + fmt("%.4f", r.achieved_fa) + " gamma=" + fmt("%.4g", r.threshold);
}

// 1. Periodogram detector at -21 dB, beta 0.7, L 11, M 15.
Outcome criterion1() {
  auto c = base(DetectorKind::periodogram);
  c.snr_db = {-21.0};
  c.beta = {0.7};
  c.periodogram.window = 11;
  const auto t = run_roc(c);
  const auto& r = row(t, 0.7, 0.05);
  return {r.detection_rate >= 0.95, rates(r) + " trials=2000 (need Pd >= 0.95)"};
}

// 2. L trend at -17 dB, beta 0.7.
Outcome criterion2() {
  std::vector<double> pd5;
  double pd1_l5 = 0.0;
  std::string detail;
  for (std::size_t l : {3u, 5u, 11u}) {
    auto c = base(DetectorKind::periodogram);
    c.snr_db = {-17.0};
    c.beta = {0.7};
    c.target_fa = {0.01, 0.05};
    c.periodogram.window = l;
    const auto t = run_roc(c);
    pd5.push_back(row(t, 0.7, 0.05).detection_rate);
    if (l == 5) pd1_l5 = row(t, 0.7, 0.01).detection_rate;
    detail += "L=" + std::to_string(l) + ":Pd5%=" + fmt("%.4f", pd5.back()) + " ";
  }
  const bool trend = std::is_sorted(pd5.begin(), pd5.end());
  detail += "L=5:Pd1%=" + fmt("%.4f", pd1_l5) + " (need non-decreasing and Pd1% >= 0.95)";
  return {trend && pd1_l5 >= 0.95, detail};
}

// 3. beta trend, each detector at the SNR of its reference beta sweep.
Outcome criterion3() {
  bool ok = true;
  std::string detail;
  const std::map<DetectorKind, double> snr{{DetectorKind::periodogram, -17.0}, {DetectorKind::scf, -23.0}};
  for (DetectorKind d : {DetectorKind::periodogram, DetectorKind::scf}) {
    auto c = base(d);
    c.snr_db = {snr.at(d)};
    c.beta = {0.5, 0.7, 2.0};
    const auto t = run_roc(c);
    std::vector<double> pd;
    for (double b : c.beta) pd.push_back(row(t, b, 0.05).detection_rate);
    ok = ok && std::is_sorted(pd.begin(), pd.end());
    detail += std::string(to_string(d)) + "@" + fmt("%g", snr.at(d)) + "dB:";
    for (std::size_t i = 0; i < pd.size(); ++i) detail += fmt(i ? ",%.4f" : "%.4f", pd[i]);
    detail += " ";
  }
  return {ok, detail + "(beta 0.5,0.7,2; need non-decreasing)"};
}

// 4. SCF detector at -21 dB, beta 2, five 5 ms segments.
Outcome criterion4() {
  auto c = base(DetectorKind::scf);
  c.snr_db = {-21.0};
  c.beta = {2.0};
  const auto t = run_roc(c);
  const auto& r = row(t, 2.0, 0.05);
  return {r.detection_rate >= 0.95, rates(r) + " trials=2000 (need Pd >= 0.95)"};
}

// 5. KS distance of 2 T_p under H0 against chi-square(L).
Outcome criterion5() {
  auto c = base(DetectorKind::periodogram);
  const std::size_t trials = 5000;
  std::vector<double> stats(trials);
  parallel_for(trials, [&](std::size_t i) {
    stats[i] = 2.0 * trial_statistic(c, DetectorKind::periodogram, -21.0, 0.7, Hypothesis::cw,
                                     trial_seed(kSeed, DetectorKind::periodogram, TrialStream::calibration, i));
  });
  const double ks = oracle::ks_chi_squared(stats, 11.0);
  const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) / trials / 2.0;
  // Diagnostics, not part of the verdict. An on-bin CW without offset
  // correction removes residual-offset leakage. Its bin-0 term is zero because
  // the SNR estimate is solved from bin 0, so it is also compared with
  // chi-square(L - 1). Exact Gamma(M, 1/M) bins isolate the departure of
  // averaged periodogram bins from Gaussian.
  const double rate = c.periodogram_sample_rate_hz;
  const std::size_t len = c.decision_length(DetectorKind::periodogram);
  const double noise = rate / c.reference_bandwidth_hz;
  PeriodogramSettings on_bin = periodogram_settings(c);
  on_bin.correct_offset = false;
  std::vector<double> on_bin_stats(trials);
  parallel_for(trials, [&](std::size_t i) {
    const std::uint64_t seed = trial_seed(kSeed, DetectorKind::periodogram, TrialStream::held_out, i);
    const auto cw = simulate_emitter(c, rate, len, -21.0, 0.7, Hypothesis::cw, 0.0, derive_seed(seed, {0}));
    on_bin_stats[i] = 2.0 * evaluate_periodogram(add_awgn(cw, noise, derive_seed(seed, {2})), on_bin).statistic;
  });
  const double on_bin_ks = oracle::ks_chi_squared(on_bin_stats, 11.0);
  const double on_bin_ks_l1 = oracle::ks_chi_squared(on_bin_stats, 10.0);
  const double gamma_ks = oracle::gamma_window_ks(11, 15.0, 400000);
  return {ks < 0.02, "KS=" + fmt("%.4f", ks) + " mean(Tp)=" + fmt("%.3f", mean) + " on-bin uncorrected KS=" +
                         fmt("%.4f", on_bin_ks) + " (vs chi2(L-1): " + fmt("%.4f", on_bin_ks_l1) + ") gamma-bin reference KS(M=15)=" + fmt("%.4f", gamma_ks) +
                         " (need KS < 0.02)"};
}

// 6. Offset estimation: noise-free accuracy and noisy post-correction peak.
Outcome criterion6() {
  const std::size_t n = 2048;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    double d = u(rng);
    while (d == 0.0) d = u(rng);
    SignalParams p;
    p.amplitude = 2.0;
    p.sample_rate_hz = static_cast<double>(n);
    const auto pg = averaged_periodogram(gen_cw_baseband(p, d, n), n, 1, 1e-300);
    worst = std::max(worst, std::abs(estimate_frequency_offset(pg).bins - d));
  }
  const std::size_t m = 15;
  const double snr = 100.0 / static_cast<double>(n);
  int hits = 0;
  for (int t = 0; t < 1000; ++t) {
    SignalParams p;
    p.amplitude = snr_to_amplitude(snr, 1.0);
    p.sample_rate_hz = static_cast<double>(n);
    p.reference_bandwidth_hz = p.sample_rate_hz;
    p.phase = 2.0 * std::numbers::pi * u(rng);
    const auto block = add_awgn(gen_cw_baseband(p, u(rng), n * m), 1.0, derive_seed(kSeed, {6, static_cast<std::uint64_t>(t)}));
    const auto pg = averaged_periodogram(block, n, m);
    double est = 0.0;
    try {
      est = estimate_frequency_offset(pg).bins;
    } catch (const Error&) {
    }
    const auto fixed = averaged_periodogram(correct_offset(block, est), n, m);
    hits += std::max_element(fixed.bins.begin(), fixed.bins.end()) == fixed.bins.begin();
  }
  return {worst < 0.01 && hits >= 990, "max noise-free error=" + fmt("%.2e", worst) + " bins, peak in bin 0: " +
                                           std::to_string(hits) + "/1000 (need < 0.01 and >= 990)"};
}

// 7. Closed-form equivalence of augmented slices (CW and FM surrogate).
Outcome criterion7() {
  const std::size_t n = 4096;
  const std::size_t ms = 33;
  const long h = 16;
  double cw_err = 0.0;
  for (double amp : {1.0, 3.5, 40.0}) {
    std::vector<cplx> x(n, cplx(amp / n, 0.0));
    const auto frame = dtft_frame(x, ms);
    const auto cf = cw_scf_closed_form(amp, n, ms, 0.1, 1.0);
    ScfWindows w;
    for (long f = -h; f <= h; ++f) w.frequency_bins.push_back(f);
    for (long a = -2 * h; a <= 2 * h; a += 2) {
      if (a != 0) w.cycle_bins.push_back(a);
    }
    const auto s = augmented_slices(frame, 0.1, 1.0, w);
    const double scale = cf.conj_plateau;
    for (double v : s.psd_slice) cw_err = std::max(cw_err, std::abs(v - cf.psd_plateau) / scale);
    for (double v : s.conj_slice) cw_err = std::max(cw_err, std::abs(v - cf.conj_plateau) / scale);
  }

  // FM surrogate: X[k] = A_k exp(j phi_k) on |k| <= L, evaluated through the
  // time domain, against the piecewise sums written out here directly.
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> am(0.1, 2.0);
  double fm_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const long l = 1 + static_cast<long>(rng() % 15);
    std::map<long, cplx> coef;
    for (long k = -l; k <= l; ++k) coef[k] = std::polar(am(rng), ph(rng));
    std::vector<cplx> x(n);
    for (std::size_t tt = 0; tt < n; ++tt) {
      cplx acc = 0.0;
      for (const auto& [k, c] : coef) acc += c * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) * tt / n);
      x[tt] = acc / static_cast<double>(n);
    }
    const auto frame = dtft_frame(x, ms);
    ScfWindows w;
    for (long f = -24; f <= 24; ++f) w.frequency_bins.push_back(f);
    for (long a = -48; a <= 48; a += 2) {
      if (a != 0) w.cycle_bins.push_back(a);
    }
    const auto s = augmented_slices(frame, 0.1, 1.0, w);
    std::vector<double> psd_expect;
    for (long f : w.frequency_bins) {
      double sum = 0.0;
      for (long k = std::max(-l, f - h); k <= std::min(l, f + h); ++k) sum += std::norm(coef[k]);
      psd_expect.push_back(0.1 * sum / (ms * static_cast<double>(n)));
    }
    std::vector<double> conj_expect;
    for (long a : w.cycle_bins) {
      const long m2 = a / 2;
      cplx sum = 0.0;
      for (long j = std::max(-l, m2 - h); j <= std::min(l, m2 + h); ++j) sum += coef[j] * std::conj(coef[-j]);
      conj_expect.push_back(std::abs(sum) / (ms * static_cast<double>(n)));
    }
    // Both slices are compared relative to the PSD plateau.
    const double plateau = *std::max_element(psd_expect.begin(), psd_expect.end());
    for (std::size_t i = 0; i < psd_expect.size(); ++i) {
      fm_err = std::max(fm_err, std::abs(s.psd_slice[i] - psd_expect[i]) / plateau);
    }
    for (std::size_t i = 0; i < conj_expect.size(); ++i) {
      fm_err = std::max(fm_err, std::abs(s.conj_slice[i] - conj_expect[i]) / plateau);
    }
  }
  return {cw_err < 1e-8 && fm_err < 1e-8,
          "CW max rel error=" + fmt("%.2e", cw_err) + " FM max rel error=" + fmt("%.2e", fm_err) + " (need < 1e-8)"};
}

// 8. FFT paths against direct summation, N <= 32, 100 random inputs.
Outcome criterion8() {
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> g;
  double pg_err = 0.0;
  double scf_err = 0.0;
  double conj_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng() % 29;
    std::size_t ms = 1 + 2 * (rng() % ((n + 1) / 2));
    if (ms > n) ms -= 2;
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(g(rng), g(rng));
    const auto fast = periodogram(x).bins;
    const auto slow = oracle::periodogram(x);
    for (std::size_t k = 0; k < n; ++k) pg_err = std::max(pg_err, std::abs(fast[k] - slow[k]));
    const auto frame = dtft_frame(x, ms);
    const auto X = oracle::dft(x);
    for (long a = -static_cast<long>(n) + 1; a < static_cast<long>(n); ++a) {
      if (a % 2 != 0) continue;
      for (long f = -static_cast<long>(n) / 2; f <= static_cast<long>(n) / 2; ++f) {
        scf_err = std::max(scf_err, std::abs(scf_estimate(frame, a, f) - oracle::scf(X, a, f, ms)));
        conj_err = std::max(conj_err, std::abs(conjugate_scf_estimate(frame, a, f) - oracle::conjugate_scf(X, a, f, ms)));
      }
    }
  }
  const double worst = std::max({pg_err, scf_err, conj_err});
  return {worst < 1e-10, "periodogram=" + fmt("%.2e", pg_err) + " scf=" + fmt("%.2e", scf_err) +
                             " conj=" + fmt("%.2e", conj_err) + " (need < 1e-10)"};
}

// 9. Invariances and bounds.
Outcome criterion9() {
  ExperimentConfig c;
  c.seed = kSeed;
  double tp_dev = 0.0;
  double ta_dev = 0.0;
  double ta_max = -INFINITY;
  double tp_min = INFINITY;
  for (int t = 0; t < 200; ++t) {
    const auto hyp = t % 2 ? Hypothesis::fm : Hypothesis::cw;
    const double scale = 0.05 + 0.2 * (t % 37);
    const auto bp = simulate_trial(c, DetectorKind::periodogram, -21.0, 0.7, hyp, derive_seed(kSeed, {9, 0, static_cast<std::uint64_t>(t)}));
    const auto bs = simulate_trial(c, DetectorKind::scf, -21.0, 2.0, hyp, derive_seed(kSeed, {9, 1, static_cast<std::uint64_t>(t)}));
    const auto scaled = [scale](const BasebandBlock& b) {
      std::vector<cplx> v(b.samples().begin(), b.samples().end());
      for (auto& s : v) s *= scale;
      return BasebandBlock(std::move(v), b.sample_rate());
    };
    const double tp = detector_statistic(c, DetectorKind::periodogram, bp);
    const double tp_s = detector_statistic(c, DetectorKind::periodogram, scaled(bp));
    const double ta = detector_statistic(c, DetectorKind::scf, bs);
    const double ta_s = detector_statistic(c, DetectorKind::scf, scaled(bs));
    tp_dev = std::max(tp_dev, std::abs(tp - tp_s) / std::max(1.0, std::abs(tp)));
    ta_dev = std::max(ta_dev, std::abs(ta - ta_s) / std::max(1.0, std::abs(ta)));
    ta_max = std::max(ta_max, ta);
    tp_min = std::min(tp_min, tp);
  }
  // Noise-free CW with kappa1 = kappa2.
  const std::size_t n = 4096;
  std::vector<cplx> x(n, cplx(0.7 / n, 0.0));
  const auto s = augmented_slices(dtft_frame(x, 33), 1.0, 1.0, ScfWindows::centered(5, 10));
  const double ta_cw = ta_statistic(s);
  const bool ok = tp_dev < 1e-8 && ta_dev < 1e-8 && ta_max <= 1.0 && tp_min >= 0.0 && std::abs(ta_cw) < 1e-8;
  return {ok, "Tp scale dev=" + fmt("%.1e", tp_dev) + " Ta scale dev=" + fmt("%.1e", ta_dev) + " max Ta=" +
                  fmt("%.3f", ta_max) + " min Tp=" + fmt("%.3f", tp_min) + " CW Ta(k1=k2)=" + fmt("%.1e", ta_cw)};
}

// 10. Held-out FA within 2 binomial standard errors, 10000 H0 trials.
Outcome criterion10() {
  bool ok = true;
  std::string detail;
  for (DetectorKind d : {DetectorKind::periodogram, DetectorKind::scf}) {
    auto c = base(d);
    c.snr_db = {-21.0};
    c.beta = {d == DetectorKind::periodogram ? 0.7 : 2.0};
    c.target_fa = {0.01, 0.05};
    c.trials = 10000;
    c.calibration_trials = 10000;
    // Only the H0 streams matter here; H1 draws are part of run_roc's output.
    const auto t = run_roc(c);
    for (double fa : c.target_fa) {
      const auto& r = row(t, c.beta.front(), fa);
      const double se = binomial_standard_error(fa, c.trials);
      const bool pass = std::abs(r.achieved_fa - fa) <= 2.0 * se;
      ok = ok && pass;
      detail += std::string(to_string(d)) + "@" + fmt("%g", fa) + ":" + fmt("%.4f", r.achieved_fa) + (pass ? " " : "(out) ");
    }
  }
  return {ok, detail + "(need |FA - target| <= 2 SE)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  }
  bool all = true;
  for (int id : which) {
    if (id < 1 || id > 10) {
      std::printf("criterion %d: unknown\n", id);
      return 2;
    }
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
