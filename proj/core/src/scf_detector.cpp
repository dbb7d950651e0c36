#include "wmsense/scf_detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fft.hpp"
#include "wmsense/error.hpp"
#include "wmsense/spectral.hpp"

namespace wmsense {

namespace {

long half_width(std::size_t smoothing) { return static_cast<long>((smoothing - 1) / 2); }

void require_even_alpha(long alpha_bin) {
  if (alpha_bin % 2 != 0) {
    fail(Errc::invalid_parameter, "cycle frequency bin must be even (no half-bin support)");
  }
}

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  }
  return m;
}

}  // namespace

SpectrumFrame::SpectrumFrame(std::vector<cplx> bins, std::size_t smoothing)
    : bins_(std::move(bins)), smoothing_(smoothing) {
  require(bins_.size() >= 4, Errc::invalid_parameter, "spectrum frame needs N >= 4");
  require(smoothing_ % 2 == 1 && smoothing_ <= bins_.size(), Errc::invalid_parameter,
          "smoothing width must be odd and at most N");
}

const cplx& SpectrumFrame::at(long k) const noexcept {
  const long n = static_cast<long>(bins_.size());
  long idx = k % n;
  if (idx < 0) idx += n;
  return bins_[static_cast<std::size_t>(idx)];
}

SpectrumFrame dtft_frame(std::span<const cplx> segment, std::size_t smoothing) {
  require(segment.size() >= 4, Errc::invalid_parameter, "frame needs N >= 4");
  std::vector<cplx> bins(segment.size());
  detail::forward_dft(segment, bins);
  return SpectrumFrame(std::move(bins), smoothing);
}

cplx scf_estimate(const SpectrumFrame& frame, long alpha_bin, long f_bin) {
  require_even_alpha(alpha_bin);
  const long h = half_width(frame.smoothing());
  const long a = alpha_bin / 2;
  cplx acc(0.0, 0.0);
  for (long k = -h; k <= h; ++k) acc += frame.at(f_bin + k + a) * std::conj(frame.at(f_bin + k - a));
  return acc / (static_cast<double>(frame.smoothing()) * static_cast<double>(frame.size()));
}

cplx conjugate_scf_estimate(const SpectrumFrame& frame, long alpha_bin, long f_bin) {
  require_even_alpha(alpha_bin);
  const long h = half_width(frame.smoothing());
  const long a = alpha_bin / 2;
  cplx acc(0.0, 0.0);
  for (long k = -h; k <= h; ++k) acc += frame.at(f_bin + k + a) * std::conj(frame.at(f_bin - k - a));
  return acc / (static_cast<double>(frame.smoothing()) * static_cast<double>(frame.size()));
}

double augmented_scf_magnitude(const SpectrumFrame& frame, double kappa1, double kappa2, long alpha_bin, long f_bin) {
  if (alpha_bin == 0) return kappa1 * std::abs(scf_estimate(frame, 0, f_bin));
  return kappa2 * std::abs(conjugate_scf_estimate(frame, alpha_bin, f_bin));
}

ScfWindows ScfWindows::centered(std::size_t frequency_count, std::size_t cycle_count) {
  require(frequency_count >= 1 && cycle_count >= 1, Errc::invalid_window, "windows must not be empty");
  ScfWindows w;
  const long below = static_cast<long>((frequency_count - 1) / 2);
  for (long i = 0; i < static_cast<long>(frequency_count); ++i) w.frequency_bins.push_back(i - below);
  const long negative = static_cast<long>(cycle_count / 2);
  const long positive = static_cast<long>(cycle_count) - negative;
  for (long i = negative; i >= 1; --i) w.cycle_bins.push_back(-2 * i);
  for (long i = 1; i <= positive; ++i) w.cycle_bins.push_back(2 * i);
  return w;
}

AugmentedScfSlices augmented_slices(const SpectrumFrame& frame, double kappa1, double kappa2,
                                    const ScfWindows& windows, long center_bin) {
  require(!windows.frequency_bins.empty() && !windows.cycle_bins.empty(), Errc::invalid_window,
          "windows must not be empty");
  const long n = static_cast<long>(frame.size());
  for (long a : windows.cycle_bins) {
    if (a == 0) fail(Errc::invalid_window, "alpha = 0 is not part of the conjugate slice");
    require(std::abs(a) < n, Errc::invalid_window, "cycle bin outside (-N, N)");
  }
  for (long f : windows.frequency_bins) {
    require(std::abs(f) <= n / 2, Errc::invalid_window, "frequency bin outside the frame");
  }

  AugmentedScfSlices s;
  s.windows = windows;
  s.kappa1 = kappa1;
  s.kappa2 = kappa2;
  s.segment_length = frame.size();
  s.smoothing = frame.smoothing();
  s.psd_slice.reserve(windows.frequency_bins.size());
  s.conj_slice.reserve(windows.cycle_bins.size());
  for (long f : windows.frequency_bins) s.psd_slice.push_back(kappa1 * std::abs(scf_estimate(frame, 0, center_bin + f)));
  for (long a : windows.cycle_bins) s.conj_slice.push_back(kappa2 * std::abs(conjugate_scf_estimate(frame, a, center_bin)));
  return s;
}

double ta_statistic(const AugmentedScfSlices& slices) {
  require(!slices.psd_slice.empty() && !slices.conj_slice.empty(), Errc::invalid_window, "empty slices");
  const double psd = std::accumulate(slices.psd_slice.begin(), slices.psd_slice.end(), 0.0);
  const double conj = std::accumulate(slices.conj_slice.begin(), slices.conj_slice.end(), 0.0);
  if (!(psd > 0.0)) fail(Errc::no_signal, "PSD slice is zero");
  const double psi = static_cast<double>(slices.psd_slice.size());
  const double omega = static_cast<double>(slices.conj_slice.size());
  return 1.0 - (psi * conj) / (omega * psd);
}

TaStatistic combine_segments(std::vector<double> values, SegmentCombiner combiner) {
  require(!values.empty(), Errc::invalid_parameter, "no segment statistics to combine");
  TaStatistic t;
  t.combiner = combiner;
  if (combiner == SegmentCombiner::mean) {
    t.value = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  } else {
    std::vector<double> copy = values;
    t.value = median_in_place(copy);
  }
  t.segment_values = std::move(values);
  return t;
}

Decision decide_scf(const TaStatistic& ta, double threshold, const Provenance& provenance) {
  return decide(ta.value, threshold, StatisticKind::ta, provenance);
}

double CwScfClosedForm::magnitude(long alpha_bin, long f_bin) const noexcept {
  if (alpha_bin == 0) return std::abs(f_bin) <= psd_half_extent ? psd_plateau : 0.0;
  if (f_bin == 0 && alpha_bin % 2 == 0 && std::abs(alpha_bin) <= cycle_half_extent) return conj_plateau;
  return 0.0;
}

CwScfClosedForm cw_scf_closed_form(double spectral_amplitude, std::size_t segment_length, std::size_t smoothing,
                                   double kappa1, double kappa2) {
  require(smoothing % 2 == 1 && smoothing <= segment_length, Errc::invalid_parameter,
          "smoothing width must be odd and at most N");
  const double scale = spectral_amplitude * spectral_amplitude /
                       (static_cast<double>(smoothing) * static_cast<double>(segment_length));
  CwScfClosedForm cf;
  cf.psd_plateau = kappa1 * scale;
  cf.conj_plateau = kappa2 * scale;
  cf.psd_half_extent = half_width(smoothing);
  cf.cycle_half_extent = 2 * half_width(smoothing);
  return cf;
}

FmScfClosedForm::FmScfClosedForm(std::vector<double> amplitudes, std::vector<double> phases,
                                 std::size_t half_bandwidth, std::size_t segment_length, std::size_t smoothing,
                                 double kappa1, double kappa2)
    : amplitudes_(std::move(amplitudes)),
      phases_(std::move(phases)),
      half_bandwidth_(static_cast<long>(half_bandwidth)),
      segment_length_(segment_length),
      smoothing_(smoothing),
      kappa1_(kappa1),
      kappa2_(kappa2) {
  const std::size_t count = 2 * half_bandwidth + 1;
  require(amplitudes_.size() == count && phases_.size() == count, Errc::invalid_parameter,
          "need 2L + 1 amplitudes and phases");
  require(smoothing_ % 2 == 1 && smoothing_ <= segment_length_, Errc::invalid_parameter,
          "smoothing width must be odd and at most N");
  require(half_bandwidth_ < half_width(smoothing_), Errc::invalid_parameter,
          "closed form needs L < (Ms - 1) / 2");
  require(2 * count <= segment_length_, Errc::invalid_parameter, "surrogate bandwidth too large for N");
}

cplx FmScfClosedForm::coefficient(long k) const {
  const auto idx = static_cast<std::size_t>(k + half_bandwidth_);
  return std::polar(amplitudes_[idx], phases_[idx]);
}

double FmScfClosedForm::psd(long f_bin) const {
  const long h = half_width(smoothing_);
  const long lo = std::max(-half_bandwidth_, f_bin - h);
  const long hi = std::min(half_bandwidth_, f_bin + h);
  double sum = 0.0;
  for (long k = lo; k <= hi; ++k) sum += std::norm(coefficient(k));
  return kappa1_ * sum / (static_cast<double>(smoothing_) * static_cast<double>(segment_length_));
}

double FmScfClosedForm::conjugate(long alpha_bin) const {
  require_even_alpha(alpha_bin);
  const long h = half_width(smoothing_);
  const long shift = alpha_bin / 2;
  const long lo = std::max(-half_bandwidth_, shift - h);
  const long hi = std::min(half_bandwidth_, shift + h);
  cplx sum(0.0, 0.0);
  for (long k = lo; k <= hi; ++k) sum += coefficient(k) * std::conj(coefficient(-k));
  return kappa2_ * std::abs(sum) / (static_cast<double>(smoothing_) * static_cast<double>(segment_length_));
}

std::vector<cplx> FmScfClosedForm::spectrum() const {
  std::vector<cplx> x(segment_length_, cplx(0.0, 0.0));
  const long n = static_cast<long>(segment_length_);
  for (long k = -half_bandwidth_; k <= half_bandwidth_; ++k) x[static_cast<std::size_t>((k + n) % n)] = coefficient(k);
  return x;
}

ScfWindows FmScfClosedForm::plateau_windows() const {
  const long reach = half_width(smoothing_) - half_bandwidth_;
  ScfWindows w;
  for (long f = -reach; f <= reach; ++f) w.frequency_bins.push_back(f);
  for (long a = -2 * reach; a <= 2 * reach; a += 2) {
    if (a != 0) w.cycle_bins.push_back(a);
  }
  return w;
}

ScfEvaluation evaluate_scf(const BasebandBlock& block, const ScfSettings& settings,
                           std::optional<std::size_t> peak_bin) {
  const std::size_t n = settings.segment_length;
  const std::size_t segments = settings.segment_count;
  require(block.size() >= n * segments, Errc::invalid_parameter, "block shorter than the decision segments");
  const ScfWindows windows = ScfWindows::centered(settings.frequency_window, settings.cycle_window);

  ScfEvaluation eval;
  const AveragedPeriodogram pg = averaged_periodogram(block, n, segments, settings.known_noise_variance);
  const std::size_t strongest = peak_bin.value_or(
      static_cast<std::size_t>(std::max_element(pg.bins.begin(), pg.bins.end()) - pg.bins.begin()));
  eval.snr_estimate = pg.noise_variance > 0.0
                          ? std::max(0.0, (pg.bins[strongest] - pg.noise_variance) /
                                              (static_cast<double>(n) * pg.noise_variance))
                          : 0.0;

  long center = 0;
  const BasebandBlock* source = &block;
  std::optional<BasebandBlock> corrected;
  if (settings.correct_offset) {
    OffsetEstimate est;
    try {
      est = peak_bin ? estimate_frequency_offset(pg, *peak_bin) : estimate_frequency_offset(pg);
    } catch (const Error& e) {
      if (e.code() != Errc::no_reliable_offset && e.code() != Errc::not_applicable) throw;
      est.bins = static_cast<double>(strongest) > static_cast<double>(n) / 2.0
                     ? static_cast<double>(strongest) - static_cast<double>(n)
                     : static_cast<double>(strongest);
      est.low_confidence = true;
    }
    eval.offset_bins = est.bins;
    eval.offset_low_confidence = est.low_confidence;
    corrected.emplace(correct_offset(block, bins_to_hz(est.bins, n, block.sample_rate())));
    source = &*corrected;
  } else {
    center = static_cast<long>(strongest);
    eval.offset_bins = static_cast<double>(strongest);
  }

  std::vector<double> values;
  values.reserve(segments);
  for (std::size_t s = 0; s < segments; ++s) {
    const SpectrumFrame frame = dtft_frame(source->segment(s, n), settings.smoothing);
    values.push_back(ta_statistic(augmented_slices(frame, settings.kappa1, settings.kappa2, windows, center)));
  }
  eval.ta = combine_segments(std::move(values), settings.combiner);
  return eval;
}

}  // namespace wmsense
