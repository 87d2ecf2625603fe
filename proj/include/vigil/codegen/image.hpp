#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/codegen/bytecode_a.hpp"
#include "vigil/codegen/bytecode_b.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::codegen {

// .cspimg, little-endian throughout:
//   header   "CSPI" version:u16 endianness:u16 io_inputs:u16 io_outputs:u16
//            stack_a:u16 spill_b:u16 entry_a:u32 entry_b:u32
//   segments 4 x { kind:u8 pad:3 base:u32 size:u32 crc:u32 }
//   symbols  count:u16, then { len:u8 name kind:u8 width:u8 flags:u8 pin:u8 off_a:u16 off_b:u16 }
//   payloads in segment-table order
//   crc32 of everything above

enum class SegmentKind : std::uint8_t { CodeA = 0, DataA = 1, CodeB = 2, DataB = 3 };
inline constexpr std::size_t kSegmentCount = 4;
std::string_view segment_name(SegmentKind k);
std::optional<SegmentKind> parse_segment_name(std::string_view name);

struct Segment {
  SegmentKind kind = SegmentKind::CodeA;
  std::uint32_t base = 0;
  std::vector<std::uint8_t> bytes;
  std::uint32_t crc = 0;  // as stored
};

inline constexpr std::uint8_t kSymbolIo = 0x01;

struct Symbol {
  std::string name;
  kernel::VarKind kind = kernel::VarKind::State;
  kernel::Width width = kernel::Width::W8;
  std::uint8_t flags = 0;
  std::uint8_t pin = 0;
  std::uint16_t offset_a = 0;
  std::uint16_t offset_b = 0;

  bool io() const { return (flags & kSymbolIo) != 0; }
};

inline constexpr std::uint16_t kImageVersion = 1;
inline constexpr std::uint16_t kLittleEndian = 1;

struct ProgramImage {
  std::uint16_t version = kImageVersion;
  std::uint16_t endianness = kLittleEndian;
  kernel::IoConfig io;
  std::uint16_t stack_a = 0;
  std::uint16_t spill_b = 0;
  std::uint32_t entry_a = 0;  // cycle routine offsets inside the code segments
  std::uint32_t entry_b = 0;
  std::array<Segment, kSegmentCount> segments;
  std::vector<Symbol> symbols;
  std::uint32_t global_crc = 0;  // as stored

  const Segment& segment(SegmentKind k) const { return segments[static_cast<std::size_t>(k)]; }
  Segment& segment(SegmentKind k) { return segments[static_cast<std::size_t>(k)]; }
  const Symbol* find(std::string_view name) const;
};

struct MemoryLayout {
  std::uint32_t origin = 0x1000;
  std::uint32_t align = 0x100;
  std::array<std::optional<std::uint32_t>, kSegmentCount> base;  // fixed bases override packing
};

/// `code_a = 0x1000` style lines; `origin` and `align` are also accepted.
MemoryLayout parse_layout(std::string_view text);

/// Builds the image. Throws E_NAME_MISMATCH when the two binaries do not
/// declare the same variables and E_MEM_OVERLAP when segments intersect.
ProgramImage link(const BytecodeA& a, const BytecodeB& b, kernel::IoConfig io, const MemoryLayout& layout = {});

/// Recomputes every stored checksum.
void seal(ProgramImage& image);

/// Throws E_MEM_OVERLAP naming the first intersecting pair.
void check_disjoint(const ProgramImage& image);

/// Throws E_UPLOAD_CRC if any stored checksum disagrees with the contents.
void check_crcs(const ProgramImage& image);

std::vector<std::uint8_t> serialize(const ProgramImage& image);
/// Structural parse only; checksums are kept as stored. Throws E_IMAGE_FORMAT.
ProgramImage deserialize(std::span<const std::uint8_t> bytes);

/// Intel HEX of all segments at their load addresses.
std::string intel_hex(const ProgramImage& image);

}  // namespace vigil::codegen
