#pragma once

#include "excitrans/chain.hpp"

#include <cstdint>
#include <vector>

namespace excitrans {

/// Stream tags so that different disorder draws of one seed are independent.
enum class RandomStream : std::uint64_t { Tunneling = 1, Positions = 2 };

/// splitmix64 finaliser; turns (seed, stream) into a well-mixed engine seed.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, RandomStream stream) noexcept;

/// Bond tunnelings J_b between sites b and b+1, b = 0 .. total_sites-2.
/// Every bond is drawn in order (so realizations of growing chains share a
/// prefix); the cavity entrance bond (M-1, M) and exit bond (M+N-1, M+N) are
/// then overwritten with Jprime when M > 0. Bonds inside the cavity region use
/// the inner hopping as their mean.
[[nodiscard]] std::vector<double> sample_tunnelings(const ChainSpec& spec);

/// Site positions in lattice-constant units, x_i = i + N(0, sigma_frac).
/// Without positional disorder the positions are exactly x_i = i.
[[nodiscard]] std::vector<double> sample_positions(const ChainSpec& spec);

}  // namespace excitrans
