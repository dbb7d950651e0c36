#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wmsense/types.hpp"

namespace wmsense {

/// Parameters of the CW / FM hypothesis models at complex baseband.
///
/// `noise_variance` is the noise power inside `reference_bandwidth_hz`; the
/// SNR is defined against it (SNR = A^2 / (4 sigma^2)). When the simulation
/// rate differs from the reference bandwidth the per-sample variance of white
/// noise scales with the rate, see `noise_variance_per_sample()`.
struct SignalParams {
  double amplitude = 0.0;
  double carrier_freq_hz = 0.0;
  double phase = 0.0;
  double freq_deviation = 1.0;
  double noise_variance = 1.0;
  double sample_rate_hz = 8e6;
  double reference_bandwidth_hz = 8e6;

  /// Throws Errc::invalid_parameter when any invariant is violated.
  void validate() const;

  double noise_variance_per_sample() const noexcept {
    return noise_variance * sample_rate_hz / reference_bandwidth_hz;
  }
  double sample_period() const noexcept { return 1.0 / sample_rate_hz; }
};

struct MessageTrace {
  std::vector<double> samples;
  double step_variance = 1.0;
  std::uint64_t seed = 0;
};

/// A = 2 sqrt(snr * sigma^2).
double snr_to_amplitude(double snr, double noise_variance);

/// SNR = A^2 / (4 sigma^2).
double amplitude_to_snr(double amplitude, double noise_variance);

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

/// Brownian message: m[0] = 0, m[k] = m[k-1] + g[k], g ~ N(0, step_variance).
MessageTrace gen_brownian_message(std::size_t n, double step_variance, std::uint64_t seed);

/// Noise-free FM phasor:
///   x[n] = (A/2) exp(j (2 pi beta T_s sum_{i<=n} m[i] + phi)).
/// Uses amplitude, phase, freq_deviation and sample_rate_hz from `params`.
BasebandBlock gen_fm_baseband(const SignalParams& params, const MessageTrace& message, std::size_t n);

/// Noise-free CW, x[n] = (A/2) exp(j phi) exp(j 2 pi n T_s df). Throws
/// Errc::aliasing when |df| >= f_s / 2.
BasebandBlock gen_cw_baseband(const SignalParams& params, double offset_hz, std::size_t n);

/// Adds circularly-symmetric complex white Gaussian noise with total variance
/// `noise_variance` per sample (half in each quadrature).
BasebandBlock add_awgn(const BasebandBlock& block, double noise_variance, std::uint64_t seed);

/// Multiplies by exp(j 2 pi n shift_hz / f_s), phase-continuous from n = 0.
BasebandBlock shift_frequency(const BasebandBlock& block, double shift_hz);

struct FrontEndSpec {
  /// FIR length; 0 selects the shortest odd length that meets the guard band.
  std::size_t taps = 0;
  /// -6 dB cutoff as a fraction of the output sample rate.
  double cutoff_fraction = 0.45;
};

/// Designs the windowed-sinc (Blackman, >= 60 dB stopband) low-pass used by
/// `front_end`, normalised to unit DC gain. Throws Errc::configuration when
/// the transition band does not fit below the output Nyquist frequency.
std::vector<double> design_lowpass(double input_rate_hz, double target_rate_hz, const FrontEndSpec& spec);

/// Down-converts by `center_hz`, low-pass filters and decimates to
/// `target_rate_hz`. The input rate must be an integer multiple of the target
/// rate. Output sample k corresponds to input sample k * decimation (the
/// filter is applied causally, so the first taps/decimation outputs carry the
/// start-up transient).
BasebandBlock front_end(const BasebandBlock& input, double center_hz, double target_rate_hz,
                        const FrontEndSpec& spec = {});

}  // namespace wmsense
