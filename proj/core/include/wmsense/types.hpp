#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wmsense {

using cplx = std::complex<double>;

/// Immutable run of complex baseband samples at a fixed rate.
class BasebandBlock {
 public:
  /// Throws Errc::invalid_parameter on an empty block, a non-positive rate,
  /// or any non-finite sample.
  BasebandBlock(std::vector<cplx> samples, double sample_rate_hz);

  std::span<const cplx> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate() const noexcept { return sample_rate_; }

  /// Samples [index*length, (index+1)*length).
  std::span<const cplx> segment(std::size_t index, std::size_t length) const;

 private:
  std::vector<cplx> samples_;
  double sample_rate_;
};

}  // namespace wmsense
