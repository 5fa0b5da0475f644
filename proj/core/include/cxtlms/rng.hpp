#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cxtlms {

using Rng = std::mt19937_64;

/// Deterministic child seed for (master, stream...) built through seed_seq, so
/// sibling streams are decorrelated even for adjacent master seeds.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> stream);

}  // namespace cxtlms
