// SPDX-License-Identifier: Apache-2.0
//
// Counter-based seed derivation so that every trial, AP and stage draws from
// its own reproducible stream.

#pragma once

#include <cstdint>
#include <initializer_list>

#include "hmb/array_model.hpp"

namespace hmb {

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes the master seed with a stream label and any number of counters.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::initializer_list<std::uint64_t> indices = {});

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(master, stream, indices));
}

/// Stream labels.
enum Stream : std::uint64_t {
  kStreamPlacement = 1,
  kStreamSchedule = 2,
  kStreamNoise = 3,
  kStreamPhases = 4,
  kStreamHash = 5,
  kStreamBound = 6,
};

} // namespace hmb
