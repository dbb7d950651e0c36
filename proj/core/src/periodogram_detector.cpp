#include "wmsense/periodogram_detector.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "wmsense/error.hpp"

namespace wmsense {

CwReferenceModel cw_reference_model(std::size_t segment_length, std::size_t segment_count, double noise_variance,
                                    double snr) {
  require(segment_length >= 2, Errc::invalid_parameter, "reference model needs N >= 2");
  require(segment_count >= 1, Errc::invalid_parameter, "reference model needs M >= 1");
  require(std::isfinite(noise_variance) && noise_variance > 0.0, Errc::invalid_parameter,
          "reference model needs sigma^2 > 0");
  require(std::isfinite(snr) && snr >= 0.0, Errc::invalid_parameter, "reference model needs snr >= 0");
  const double n = static_cast<double>(segment_length);
  const double m = static_cast<double>(segment_count);
  const double s4 = noise_variance * noise_variance;

  CwReferenceModel ref;
  ref.mean.assign(segment_length, noise_variance);
  ref.variance.assign(segment_length, s4 / m);
  ref.mean[0] = noise_variance * (n * snr + 1.0);
  ref.variance[0] = s4 * (2.0 * n * snr + 1.0) / m;
  ref.segment_length = segment_length;
  ref.segment_count = segment_count;
  ref.noise_variance = noise_variance;
  ref.snr = snr;
  return ref;
}

EmpiricalMoments empirical_moments(std::span<const Periodogram> segments, bool with_covariance) {
  require(!segments.empty(), Errc::invalid_parameter, "empirical moments need M >= 1");
  if (with_covariance) {
    require(segments.size() >= 2, Errc::invalid_parameter, "empirical covariance needs M >= 2");
  }
  const std::size_t n = segments.front().segment_length();
  const std::size_t m = segments.size();
  EmpiricalMoments em;
  em.segment_length = n;
  em.segment_count = m;
  em.mean.assign(n, 0.0);
  for (const Periodogram& p : segments) {
    require(p.segment_length() == n, Errc::invalid_parameter, "segment lengths differ");
    for (std::size_t k = 0; k < n; ++k) em.mean[k] += p.bins[k];
  }
  for (double& v : em.mean) v /= static_cast<double>(m);
  if (!with_covariance) return em;

  Eigen::MatrixXd centred(m, n);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t k = 0; k < n; ++k) centred(s, k) = segments[s].bins[k] - em.mean[k];
  }
  Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(m - 1);
  em.covariance.resize(n * n);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(em.covariance.data(), n, n) = cov;
  return em;
}

double kl_statistic_full(const EmpiricalMoments& moments, const CwReferenceModel& ref) {
  const std::size_t n = ref.segment_length;
  require(moments.segment_length == n && moments.mean.size() == n, Errc::invalid_parameter,
          "moments and reference model differ in length");
  require(moments.covariance.size() == n * n, Errc::invalid_parameter, "empirical covariance missing");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> per_segment(
      moments.covariance.data(), n, n);
  Eigen::MatrixXd cov = per_segment / static_cast<double>(moments.segment_count);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    const double ridge = 1e-6 * cov.trace() / static_cast<double>(n);
    cov.diagonal().array() += ridge;
    llt.compute(cov);
    if (ridge <= 0.0 || llt.info() != Eigen::Success) {
      fail(Errc::invalid_parameter, "empirical covariance is singular after regularisation");
    }
  }
  const Eigen::MatrixXd& l = llt.matrixL();
  const double log_det_e = 2.0 * l.diagonal().array().log().sum();

  double quad = 0.0;
  double trace = 0.0;
  double log_det_ref = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = moments.mean[k] - ref.mean[k];
    quad += d * d / ref.variance[k];
    trace += cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) / ref.variance[k];
    log_det_ref += std::log(ref.variance[k]);
  }
  return 0.5 * quad + 0.5 * (trace - static_cast<double>(n) + log_det_ref - log_det_e);
}

std::vector<std::size_t> window_bins(std::size_t segment_length, std::size_t window, WindowPlacement placement) {
  require(window >= 1 && window <= segment_length, Errc::invalid_parameter, "window must satisfy 1 <= L <= N");
  std::vector<std::size_t> bins(window);
  if (placement == WindowPlacement::first_bins) {
    for (std::size_t i = 0; i < window; ++i) bins[i] = i;
  } else {
    // Odd L is symmetric; even L takes the extra bin on the positive side.
    const std::size_t below = (window - 1) / 2;
    for (std::size_t i = 0; i < window; ++i) bins[i] = (segment_length + i - below) % segment_length;
  }
  return bins;
}

double kl_statistic_windowed(std::span<const double> averaged_bins, const CwReferenceModel& ref, std::size_t window,
                             WindowPlacement placement) {
  require(averaged_bins.size() == ref.segment_length, Errc::invalid_parameter,
          "averaged periodogram and reference model differ in length");
  double sum = 0.0;
  for (std::size_t k : window_bins(ref.segment_length, window, placement)) {
    const double d = averaged_bins[k] - ref.mean[k];
    sum += d * d / ref.variance[k];
  }
  return 0.5 * sum;
}

Decision decide_periodogram(std::span<const double> averaged_bins, const CwReferenceModel& ref, std::size_t window,
                            double threshold, WindowPlacement placement, const Provenance& provenance) {
  return decide(kl_statistic_windowed(averaged_bins, ref, window, placement), threshold, StatisticKind::tp,
                provenance);
}

namespace {

// Circularly rotates bins so that `bin` becomes bin 0.
std::vector<Periodogram> rotate_to(std::vector<Periodogram> segments, std::size_t bin) {
  for (Periodogram& p : segments) {
    std::rotate(p.bins.begin(), p.bins.begin() + static_cast<std::ptrdiff_t>(bin), p.bins.end());
  }
  return segments;
}

}  // namespace

PeriodogramEvaluation evaluate_periodogram(const BasebandBlock& block, const PeriodogramSettings& settings,
                                           std::optional<std::size_t> peak_bin) {
  const std::size_t n = settings.segment_length;
  const std::size_t m = settings.segment_count;
  require(settings.statistic == StatisticKind::tp || settings.statistic == StatisticKind::tp0,
          Errc::invalid_parameter, "periodogram detector computes Tp or Tp0");
  const bool all_zero = std::all_of(block.samples().begin(), block.samples().begin() +
                                        static_cast<std::ptrdiff_t>(std::min(block.size(), n * m)),
                                    [](const cplx& s) { return s == cplx(0.0, 0.0); });
  if (all_zero) fail(Errc::no_signal, "block is identically zero");

  PeriodogramEvaluation eval;
  const AveragedPeriodogram first = averaged_periodogram(block, n, m, settings.known_noise_variance);
  const std::size_t strongest =
      peak_bin.value_or(static_cast<std::size_t>(std::max_element(first.bins.begin(), first.bins.end()) -
                                                 first.bins.begin()));

  std::vector<Periodogram> segments;
  if (settings.correct_offset) {
    OffsetEstimate est;
    try {
      est = peak_bin ? estimate_frequency_offset(first, *peak_bin) : estimate_frequency_offset(first);
    } catch (const Error& e) {
      if (e.code() != Errc::no_reliable_offset && e.code() != Errc::not_applicable) throw;
      est.peak_bin = strongest;
      est.bins = static_cast<double>(strongest) > static_cast<double>(n) / 2.0
                     ? static_cast<double>(strongest) - static_cast<double>(n)
                     : static_cast<double>(strongest);
      est.low_confidence = true;
    }
    eval.offset_bins = est.bins;
    eval.offset_low_confidence = est.low_confidence;
    const BasebandBlock centred = correct_offset(block, bins_to_hz(est.bins, n, block.sample_rate()));
    segments = segment_periodograms(centred, n, m);
  } else {
    eval.offset_bins = static_cast<double>(strongest);
    segments = rotate_to(segment_periodograms(block, n, m), strongest);
  }

  eval.centred = average(segments, settings.known_noise_variance);
  if (eval.centred.noise_estimated) {
    eval.centred.noise_variance =
        estimate_noise_variance(eval.centred, BinWindow{0, default_exclusion_half_width(n)});
  }
  const double s2 = eval.centred.noise_variance;
  require(s2 > 0.0, Errc::no_signal, "noise level estimate is zero");
  eval.noise_variance = s2;
  eval.snr_estimate = std::max(0.0, (eval.centred.bins[0] - s2) / (static_cast<double>(n) * s2));

  const CwReferenceModel ref = cw_reference_model(n, m, s2, eval.snr_estimate);
  if (settings.statistic == StatisticKind::tp0) {
    eval.statistic = kl_statistic_full(empirical_moments(segments), ref);
  } else {
    eval.statistic = kl_statistic_windowed(eval.centred.bins, ref, settings.window, settings.placement);
  }
  return eval;
}

}  // namespace wmsense
