#pragma once

#include <iosfwd>

#include "abc/abc_core.hpp"

namespace abc {

// Binary layout, all integers and doubles little-endian:
//   "ABCT" | u32 version | u64 N | u32 p | u32 m | u64 seed
//   | u32 id_len | id bytes | p theta columns (N f64 each) | m summary columns
inline constexpr std::uint32_t kTableFormatVersion = 1;

void write_table_binary(std::ostream& out, const ReferenceTable& table);
ReferenceTable read_table_binary(std::istream& in);

// Header theta_0..theta_{p-1},s_0..s_{m-1}; one row per draw.
void write_table_csv(std::ostream& out, const ReferenceTable& table);

}  // namespace abc
