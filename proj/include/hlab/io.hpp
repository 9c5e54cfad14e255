#pragma once

#include "hlab/fields.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hlab {

/// Raw snapshot: 64-byte little-endian header then one f64 per node.
///   0  "HLAB"          4  u16 version      6  u8 dim     7  u8 topology (0 periodic, 1 box)
///   8  u32 count[3]    20 reserved (4)     24 f64 time   32 f64 extent[3]
///   56 u64 value count
inline constexpr std::uint16_t raw_version = 1;
inline constexpr std::size_t raw_header_bytes = 64;

struct RawSnapshot {
    double time = 0.0;
    ScalarField field;
};

std::vector<unsigned char> encode_raw(const ScalarField &field, double time);
RawSnapshot decode_raw(const std::vector<unsigned char> &bytes);

void write_raw(const std::string &path, const ScalarField &field, double time);
RawSnapshot read_raw(const std::string &path);

/// One row per node: coordinates then value, %.17g.
void write_csv(const std::string &path, const ScalarField &field, const std::string &value_name = "value");

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace hlab
