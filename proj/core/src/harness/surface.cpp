#include "wmsense/harness/surface.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "wmsense/error.hpp"
#include "wmsense/rng.hpp"
#include "wmsense/spectral.hpp"

namespace wmsense::harness {

namespace {

long parse_long(std::string_view s, std::string_view whole) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(Errc::validation, "malformed range '" + std::string(whole) + "', expected lo:hi");
  }
  return v;
}

}  // namespace

IndexRange parse_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) fail(Errc::validation, "malformed range '" + std::string(text) + "', expected lo:hi");
  IndexRange r{parse_long(text.substr(0, colon), text), parse_long(text.substr(colon + 1), text)};
  if (r.lo > r.hi) fail(Errc::validation, "range '" + std::string(text) + "' has lo > hi");
  return r;
}

void write_scf_surface(std::ostream& out, const SpectrumFrame& frame, double kappa1, double kappa2,
                       const SurfaceGrid& grid) {
  const long n = static_cast<long>(frame.size());
  const auto within = [](const IndexRange& r, long lo, long hi) { return r.lo >= lo && r.hi <= hi + 1; };
  if (grid.alpha.lo > grid.alpha.hi || grid.f.lo > grid.f.hi) fail(Errc::validation, "range has lo > hi");
  if (grid.alpha.lo < grid.alpha.hi && !within(grid.alpha, -n + 1, n - 1)) {
    fail(Errc::validation, "alpha range outside (-N, N)");
  }
  if (grid.f.lo < grid.f.hi && !within(grid.f, -n / 2, n / 2)) fail(Errc::validation, "f range outside [-N/2, N/2]");

  out << "alpha_bin,f_bin,magnitude\n";
  char buf[32];
  for (long a = grid.alpha.lo; a < grid.alpha.hi; ++a) {
    if (a % 2 != 0) continue;
    for (long f = grid.f.lo; f < grid.f.hi; ++f) {
      std::snprintf(buf, sizeof buf, "%.12g", augmented_scf_magnitude(frame, kappa1, kappa2, a, f));
      out << a << ',' << f << ',' << buf << '\n';
    }
  }
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "cw") return SyntheticKind::cw;
  if (name == "fm") return SyntheticKind::fm;
  fail(Errc::validation, "unknown synthetic signal '" + std::string(name) + "' (cw or fm)");
}

SpectrumFrame synthetic_frame(const SyntheticSurfaceSpec& spec) {
  if (spec.kind == SyntheticKind::cw) {
    require(spec.segment_length >= 4, Errc::validation, "segment length must be >= 4");
    std::vector<cplx> bins(spec.segment_length, cplx(0.0, 0.0));
    bins[0] = cplx(spec.amplitude, 0.0);
    return SpectrumFrame(std::move(bins), spec.smoothing);
  }
  const std::size_t count = 2 * spec.half_bandwidth + 1;
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> amplitudes(count);
  std::vector<double> phases(count);
  const double width = std::max(1.0, static_cast<double>(spec.half_bandwidth) / 2.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double k = static_cast<double>(i) - static_cast<double>(spec.half_bandwidth);
    amplitudes[i] = spec.amplitude * std::exp(-k * k / (2.0 * width * width));
    phases[i] = phase(rng);
  }
  const FmScfClosedForm surrogate(std::move(amplitudes), std::move(phases), spec.half_bandwidth,
                                  spec.segment_length, spec.smoothing, 1.0, 1.0);
  return SpectrumFrame(surrogate.spectrum(), spec.smoothing);
}

SpectrumFrame capture_frame(const BasebandBlock& block, const ScfSettings& settings) {
  const std::size_t n = settings.segment_length;
  require(block.size() >= n, Errc::validation, "capture shorter than one SCF segment");
  const std::size_t m = std::min(settings.segment_count, block.size() / n);
  const AveragedPeriodogram pg = averaged_periodogram(block, n, m);
  double offset_bins = 0.0;
  try {
    offset_bins = estimate_frequency_offset(pg).bins;
  } catch (const Error& e) {
    if (e.code() != Errc::no_reliable_offset && e.code() != Errc::not_applicable) throw;
  }
  const BasebandBlock centred = correct_offset(block, bins_to_hz(offset_bins, n, block.sample_rate()));
  return dtft_frame(centred.segment(0, n), settings.smoothing);
}

}  // namespace wmsense::harness
