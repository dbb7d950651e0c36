#include "wmsense/sigmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wmsense/error.hpp"
#include "wmsense/rng.hpp"

namespace wmsense {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(j 2 pi n cycles_per_sample) without accumulating phase error over long
// blocks: the fractional cycle count is reduced before the trig call.
cplx unit_phasor(double cycles) { return std::polar(1.0, kTwoPi * (cycles - std::floor(cycles))); }

}  // namespace

BasebandBlock::BasebandBlock(std::vector<cplx> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_(sample_rate_hz) {
  require(!samples_.empty(), Errc::invalid_parameter, "baseband block must not be empty");
  require(std::isfinite(sample_rate_) && sample_rate_ > 0.0, Errc::invalid_parameter,
          "sample rate must be positive");
  for (const cplx& s : samples_) {
    require(std::isfinite(s.real()) && std::isfinite(s.imag()), Errc::invalid_parameter,
            "baseband block contains non-finite samples");
  }
}

std::span<const cplx> BasebandBlock::segment(std::size_t index, std::size_t length) const {
  require(length > 0 && (index + 1) * length <= samples_.size(), Errc::invalid_parameter,
          "segment out of range");
  return std::span<const cplx>(samples_).subspan(index * length, length);
}

void SignalParams::validate() const {
  require(std::isfinite(amplitude) && amplitude >= 0.0, Errc::invalid_parameter, "amplitude must be >= 0");
  require(std::isfinite(noise_variance) && noise_variance > 0.0, Errc::invalid_parameter,
          "noise variance must be > 0");
  require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, Errc::invalid_parameter,
          "sample rate must be > 0");
  require(std::isfinite(freq_deviation) && freq_deviation >= 0.0, Errc::invalid_parameter,
          "frequency deviation must be >= 0");
  require(std::isfinite(reference_bandwidth_hz) && reference_bandwidth_hz > 0.0, Errc::invalid_parameter,
          "reference bandwidth must be > 0");
  require(std::isfinite(phase), Errc::invalid_parameter, "phase must be finite");
}

double snr_to_amplitude(double snr, double noise_variance) {
  require(std::isfinite(snr) && snr >= 0.0, Errc::invalid_parameter, "snr must be >= 0");
  require(std::isfinite(noise_variance) && noise_variance > 0.0, Errc::invalid_parameter,
          "noise variance must be > 0");
  return 2.0 * std::sqrt(snr * noise_variance);
}

double amplitude_to_snr(double amplitude, double noise_variance) {
  require(noise_variance > 0.0, Errc::invalid_parameter, "noise variance must be > 0");
  return amplitude * amplitude / (4.0 * noise_variance);
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

MessageTrace gen_brownian_message(std::size_t n, double step_variance, std::uint64_t seed) {
  require(n >= 1, Errc::invalid_parameter, "message length must be >= 1");
  require(std::isfinite(step_variance) && step_variance > 0.0, Errc::invalid_parameter,
          "step variance must be > 0");
  MessageTrace trace{std::vector<double>(n), step_variance, seed};
  Rng rng(seed);
  std::normal_distribution<double> step(0.0, std::sqrt(step_variance));
  double level = 0.0;
  trace.samples[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    level += step(rng);
    trace.samples[i] = level;
  }
  return trace;
}

BasebandBlock gen_fm_baseband(const SignalParams& params, const MessageTrace& message, std::size_t n) {
  params.validate();
  require(n >= 1, Errc::invalid_parameter, "block length must be >= 1");
  require(message.samples.size() >= n, Errc::invalid_parameter, "message shorter than requested block");
  const double half_amplitude = params.amplitude / 2.0;
  const double cycles_per_unit = params.freq_deviation * params.sample_period();
  const double phase_cycles = params.phase / kTwoPi;
  std::vector<cplx> out(n);
  // Accumulated phase is kept in cycles and wrapped to [0, 1) every sample.
  double cycles = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cycles += cycles_per_unit * message.samples[i];
    cycles -= std::floor(cycles);
    out[i] = half_amplitude * unit_phasor(cycles + phase_cycles);
  }
  return BasebandBlock(std::move(out), params.sample_rate_hz);
}

BasebandBlock gen_cw_baseband(const SignalParams& params, double offset_hz, std::size_t n) {
  params.validate();
  require(n >= 1, Errc::invalid_parameter, "block length must be >= 1");
  if (!(std::abs(offset_hz) < params.sample_rate_hz / 2.0)) {
    fail(Errc::aliasing, "CW offset " + std::to_string(offset_hz) + " Hz is outside the Nyquist band");
  }
  const double half_amplitude = params.amplitude / 2.0;
  const double step = offset_hz / params.sample_rate_hz;
  const double phase_cycles = params.phase / kTwoPi;
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double cycles = std::fmod(static_cast<double>(i) * step, 1.0);
    out[i] = half_amplitude * unit_phasor(cycles + phase_cycles);
  }
  return BasebandBlock(std::move(out), params.sample_rate_hz);
}

BasebandBlock add_awgn(const BasebandBlock& block, double noise_variance, std::uint64_t seed) {
  require(std::isfinite(noise_variance) && noise_variance >= 0.0, Errc::invalid_parameter,
          "noise variance must be >= 0");
  std::vector<cplx> out(block.samples().begin(), block.samples().end());
  if (noise_variance > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> quadrature(0.0, std::sqrt(noise_variance / 2.0));
    for (cplx& s : out) {
      const double re = quadrature(rng);
      const double im = quadrature(rng);
      s += cplx(re, im);
    }
  }
  return BasebandBlock(std::move(out), block.sample_rate());
}

BasebandBlock shift_frequency(const BasebandBlock& block, double shift_hz) {
  const double step = shift_hz / block.sample_rate();
  std::vector<cplx> out(block.size());
  auto in = block.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = in[i] * unit_phasor(std::fmod(static_cast<double>(i) * step, 1.0));
  }
  return BasebandBlock(std::move(out), block.sample_rate());
}

namespace {

std::size_t decimation_factor(double input_rate_hz, double target_rate_hz) {
  require(target_rate_hz > 0.0 && input_rate_hz >= target_rate_hz, Errc::configuration,
          "front end: target rate must be positive and not above the input rate");
  const double ratio = input_rate_hz / target_rate_hz;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * rounded) {
    fail(Errc::configuration, "front end: input rate is not an integer multiple of the target rate");
  }
  return static_cast<std::size_t>(rounded);
}

// Blackman main-lobe width in cycles/sample for an L-tap window.
constexpr double kBlackmanTransition = 5.5;

}  // namespace

std::vector<double> design_lowpass(double input_rate_hz, double target_rate_hz, const FrontEndSpec& spec) {
  const std::size_t decimation = decimation_factor(input_rate_hz, target_rate_hz);
  require(spec.cutoff_fraction > 0.0 && spec.cutoff_fraction < 0.5, Errc::configuration,
          "front end: cutoff fraction must lie in (0, 0.5)");
  // Normalised to the input rate.
  const double cutoff = spec.cutoff_fraction / static_cast<double>(decimation);
  const double guard = 0.5 / static_cast<double>(decimation) - cutoff;

  std::size_t taps = spec.taps;
  if (taps == 0) {
    taps = static_cast<std::size_t>(std::ceil(kBlackmanTransition / (2.0 * guard)));
    taps |= 1U;
  }
  require(taps >= 3, Errc::configuration, "front end: filter needs at least 3 taps");
  const double half_transition = kBlackmanTransition / (2.0 * static_cast<double>(taps));
  if (half_transition > guard + 1e-12) {
    fail(Errc::configuration, "front end: filter transition band (" + std::to_string(taps) +
                                  " taps) is wider than the guard below the output Nyquist frequency");
  }

  std::vector<double> h(taps);
  const double centre = static_cast<double>(taps - 1) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - centre;
    const double sinc = t == 0.0 ? 2.0 * cutoff
                                 : std::sin(kTwoPi * cutoff * t) / (std::numbers::pi * t);
    const double phase = kTwoPi * static_cast<double>(i) / static_cast<double>(taps - 1);
    const double window = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
    h[i] = sinc * window;
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

BasebandBlock front_end(const BasebandBlock& input, double center_hz, double target_rate_hz,
                        const FrontEndSpec& spec) {
  const double input_rate = input.sample_rate();
  require(std::abs(center_hz) < input_rate / 2.0, Errc::configuration,
          "front end: tuning frequency outside the input Nyquist band");
  const std::size_t decimation = decimation_factor(input_rate, target_rate_hz);
  const std::vector<double> h = design_lowpass(input_rate, target_rate_hz, spec);

  const BasebandBlock mixed = shift_frequency(input, -center_hz);
  auto x = mixed.samples();
  const std::size_t outputs = x.size() / decimation;
  require(outputs >= 1, Errc::invalid_parameter, "front end: input shorter than one output sample");

  std::vector<cplx> out(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    const std::size_t n = k * decimation;
    cplx acc(0.0, 0.0);
    const std::size_t span = std::min(h.size(), n + 1);
    for (std::size_t i = 0; i < span; ++i) acc += h[i] * x[n - i];
    out[k] = acc;
  }
  return BasebandBlock(std::move(out), target_rate_hz);
}

}  // namespace wmsense
