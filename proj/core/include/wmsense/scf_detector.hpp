#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wmsense/decision.hpp"
#include "wmsense/periodogram_detector.hpp"
#include "wmsense/types.hpp"

namespace wmsense {

/// Unnormalised transform of one segment, X[k] = sum_n x[n] exp(-j 2 pi k n / N),
/// together with the odd spectral smoothing width used by the SCF estimators.
class SpectrumFrame {
 public:
  SpectrumFrame(std::vector<cplx> bins, std::size_t smoothing);

  std::size_t size() const noexcept { return bins_.size(); }
  std::size_t smoothing() const noexcept { return smoothing_; }
  std::span<const cplx> bins() const noexcept { return bins_; }

  /// Circular (mod N) access with signed bin index.
  const cplx& at(long k) const noexcept;

 private:
  std::vector<cplx> bins_;
  std::size_t smoothing_;
};

SpectrumFrame dtft_frame(std::span<const cplx> segment, std::size_t smoothing);

/// (1 / (Ms N)) sum_{k=-h}^{h} X[f + k + a/2] conj(X[f + k - a/2]), h = (Ms - 1) / 2.
/// `alpha_bin` must be even. Throws Errc::invalid_parameter otherwise.
cplx scf_estimate(const SpectrumFrame& frame, long alpha_bin, long f_bin);

/// (1 / (Ms N)) sum_{k=-h}^{h} X[f + k + a/2] conj(X[f - k - a/2]).
cplx conjugate_scf_estimate(const SpectrumFrame& frame, long alpha_bin, long f_bin);

/// Magnitude of the augmented SCF: kappa1 |SCF| on alpha = 0 and kappa2
/// |conjugate SCF| elsewhere.
double augmented_scf_magnitude(const SpectrumFrame& frame, double kappa1, double kappa2, long alpha_bin, long f_bin);

/// Frequency-bin window (Psi) and cycle-frequency window (Omega, even alpha
/// bins, never 0).
struct ScfWindows {
  std::vector<long> frequency_bins;
  std::vector<long> cycle_bins;

  /// `frequency_count` bins centred on f = 0 and the `cycle_count` even alpha
  /// bins nearest alpha = 0 excluding 0, split symmetrically (an odd count
  /// puts the extra bin on the positive side).
  static ScfWindows centered(std::size_t frequency_count, std::size_t cycle_count);
};

struct AugmentedScfSlices {
  std::vector<double> psd_slice;   // kappa1 |S^0(f)|, f in Psi
  std::vector<double> conj_slice;  // kappa2 |S^a_c(0)|, a in Omega
  ScfWindows windows;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  std::size_t segment_length = 0;
  std::size_t smoothing = 0;
};

/// Evaluates only the two slices needed for T_a. `center_bin` shifts both
/// slices (psd at center + Psi, conjugate SCF at f = center); it is 0 after
/// offset correction. Throws Errc::invalid_window if 0 is in Omega or a window
/// is empty.
AugmentedScfSlices augmented_slices(const SpectrumFrame& frame, double kappa1, double kappa2,
                                    const ScfWindows& windows, long center_bin = 0);

/// T_a = 1 - (|Psi| sum conj_slice) / (|Omega| sum psd_slice). Throws
/// Errc::no_signal when the psd slice sums to zero.
double ta_statistic(const AugmentedScfSlices& slices);

enum class SegmentCombiner { mean, median };

struct TaStatistic {
  double value = 0.0;
  std::vector<double> segment_values;
  SegmentCombiner combiner = SegmentCombiner::mean;
};

TaStatistic combine_segments(std::vector<double> values, SegmentCombiner combiner = SegmentCombiner::mean);

Decision decide_scf(const TaStatistic& ta, double threshold, const Provenance& provenance = {});

/// Closed-form augmented SCF of a noise-free on-bin CW whose only non-zero bin
/// is X[0] = spectral_amplitude.
struct CwScfClosedForm {
  double psd_plateau = 0.0;    // kappa1 A^2 / (Ms N) on alpha = 0, |f| <= h
  double conj_plateau = 0.0;   // kappa2 A^2 / (Ms N) on f = 0, |alpha| <= 2h
  long psd_half_extent = 0;    // h
  long cycle_half_extent = 0;  // 2h

  double magnitude(long alpha_bin, long f_bin) const noexcept;
};

CwScfClosedForm cw_scf_closed_form(double spectral_amplitude, std::size_t segment_length, std::size_t smoothing,
                                   double kappa1, double kappa2);

/// Closed form on the two axes for the two-sided narrowband surrogate with
/// X[k] = A_k exp(j phi_k), |k| <= half_bandwidth, zero elsewhere. Values on
/// the plateaus are (kappa1 / (Ms N)) sum A_k^2 and
/// (kappa2 / (Ms N)) |sum A_k A_-k exp(j (phi_k - phi_-k))|; edges are the
/// corresponding partial sums.
class FmScfClosedForm {
 public:
  FmScfClosedForm(std::vector<double> amplitudes, std::vector<double> phases, std::size_t half_bandwidth,
                  std::size_t segment_length, std::size_t smoothing, double kappa1, double kappa2);

  double psd(long f_bin) const;
  double conjugate(long alpha_bin) const;
  double psd_plateau() const { return psd(0); }
  double conj_plateau() const { return conjugate(2); }

  /// Surrogate spectrum of length N (bins -L..L filled, circularly).
  std::vector<cplx> spectrum() const;

  /// Psi and Omega over which both slices sit on their plateaus:
  /// |f| <= h - L and 0 < |alpha| <= 2 (h - L).
  ScfWindows plateau_windows() const;

 private:
  cplx coefficient(long k) const;

  std::vector<double> amplitudes_;
  std::vector<double> phases_;
  long half_bandwidth_;
  std::size_t segment_length_;
  std::size_t smoothing_;
  double kappa1_;
  double kappa2_;
};

struct ScfSettings {
  std::size_t segment_length = 4096;
  std::size_t segment_count = 5;
  std::size_t smoothing = 33;
  double kappa1 = 0.1;
  double kappa2 = 1.0;
  std::size_t frequency_window = 5;
  std::size_t cycle_window = 10;
  SegmentCombiner combiner = SegmentCombiner::mean;
  bool correct_offset = true;
  std::optional<double> known_noise_variance;
};

struct ScfEvaluation {
  TaStatistic ta;
  double offset_bins = 0.0;
  bool offset_low_confidence = false;
  double snr_estimate = 0.0;
};

/// Offset estimate on the averaged periodogram of the decision segments, one
/// frame per segment of the corrected block, T_a per frame, then combined.
/// Without offset correction the slices are re-centred on the peak bin.
ScfEvaluation evaluate_scf(const BasebandBlock& block, const ScfSettings& settings,
                           std::optional<std::size_t> peak_bin = std::nullopt);

}  // namespace wmsense
