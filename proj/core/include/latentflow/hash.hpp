#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace latentflow {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffsetBasis);

/// MurmurHash3 64-bit finalizer.
std::uint64_t fmix64(std::uint64_t h);

/// SplitMix64 step; used to derive independent sub-seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

std::string hex64(std::uint64_t value);

/// FNV-1a digest of a file's contents, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace latentflow
