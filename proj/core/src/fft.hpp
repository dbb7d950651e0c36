#pragma once

#include <span>

#include "wmsense/types.hpp"

namespace wmsense::detail {

// Unnormalised forward DFT: out[k] = sum_n in[n] exp(-j 2 pi k n / N).
// Thread-safe; plans are cached per length.
void forward_dft(std::span<const cplx> in, std::span<cplx> out);

}  // namespace wmsense::detail
