#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cal/model.hpp"

namespace cal {

struct Checkpoint {
    SegModel model;
    AdamState optimizer;

    bool operator==(const Checkpoint&) const = default;
};

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Binary layout, all little-endian:
///   "CALM" | u16 version | u32 window | u32 bands | u64 parameter count |
///   f64 weights[F] | f64 bias | f64 mean[F] | f64 scale[F] |
///   f64 first_moment[F+1] | f64 second_moment[F+1] | f64 step
/// where F = window * window * bands. Optimizer hyper-parameters are not stored; they
/// come from the run configuration (defaults on decode).
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cal
