#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wmsense {

/// The one generator used for every stochastic operation.
using Rng = std::mt19937_64;

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Sub-seed derivation. Starting from `seed`, each path element is folded in
// with h <- mix64(h ^ mix64(element + golden * (position + 1))). Distinct
// paths give statistically independent streams, so a master seed fans out
// into per-(detector, stream, trial) seeds without any shared state.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

}  // namespace wmsense
