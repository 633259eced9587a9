#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lift {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based seed splitting: the master seed is folded with each
/// component in order through splitmix64, so a child seed depends only on
/// (master, path) and never on how many draws happened elsewhere.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// Stable 64-bit tag for a string path component (FNV-1a).
std::uint64_t tag(std::string_view text) noexcept;

/// FNV-1a digest rendered as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);

}  // namespace lift
