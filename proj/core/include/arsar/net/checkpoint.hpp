#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arsar/net/params.hpp"

namespace arsar::net {

// ARSW: "ARSW" | u16 version=1 | u8 variant | u8 norm |
// u32 num_layers | u32 base_channels | u32 pyramid_levels | u32 pair_count |
// u32 height | u32 width | u8 share_weights | 7 reserved | u64 seed |
// u64 n | n f64 parameters in plan order |
// u64 m | m f64 running statistics in plan order. All little-endian.
inline constexpr std::uint16_t kArswVersion = 1;

std::vector<unsigned char> encode_checkpoint(const NetParams& p);
/// Throws FormatError on malformed bytes and ShapeError when the stored
/// counts disagree with the plan derived from the stored config.
NetParams decode_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::string& path, const NetParams& p);
NetParams load_checkpoint(const std::string& path);

}  // namespace arsar::net
