#include "vigil/codegen/crc32.hpp"

#include <array>

namespace vigil::codegen {
namespace {

constexpr std::uint32_t kReflectedPoly = 0xEDB88320u;  // 0x04C11DB7 bit-reversed

constexpr std::array<std::uint32_t, 256> make_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1u) ? (c >> 1) ^ kReflectedPoly : c >> 1;
    table[i] = c;
  }
  return table;
}

constexpr auto kTable = make_table();

}  // namespace

std::uint32_t crc32_update(std::uint32_t state, std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes) state = kTable[(state ^ b) & 0xFFu] ^ (state >> 8);
  return state;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) { return crc32_finish(crc32_update(kCrcInit, bytes)); }

std::uint32_t crc32(std::string_view bytes) {
  return crc32(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace vigil::codegen
