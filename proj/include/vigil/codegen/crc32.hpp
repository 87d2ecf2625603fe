#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace vigil::codegen {

/// CRC-32 (IEEE 802.3): polynomial 0x04C11DB7, reflected input and output,
/// init 0xFFFFFFFF, final xor 0xFFFFFFFF. Check value of "123456789" is
/// 0xCBF43926.
std::uint32_t crc32(std::span<const std::uint8_t> bytes);
std::uint32_t crc32(std::string_view bytes);

/// Incremental form: crc32_update(kCrcInit, ...) then crc32_finish.
inline constexpr std::uint32_t kCrcInit = 0xFFFFFFFFu;
std::uint32_t crc32_update(std::uint32_t state, std::span<const std::uint8_t> bytes);
constexpr std::uint32_t crc32_finish(std::uint32_t state) { return state ^ 0xFFFFFFFFu; }

}  // namespace vigil::codegen
