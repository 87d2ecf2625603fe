#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/kernel/program.hpp"

namespace vigil::codegen {

/// Placement of one logical variable inside a binary's data segment.
struct DataSlot {
  std::string name;
  kernel::VarKind kind = kernel::VarKind::State;
  kernel::ScalarType type;
  int pin = 0;
  std::uint32_t offset = 0;
  std::uint32_t initial = 0;
};

struct DataLayout {
  std::vector<DataSlot> slots;  // in placement order
  std::uint32_t size = 0;

  const DataSlot* find(std::string_view name) const;
  /// Initial segment contents, little-endian.
  std::vector<std::uint8_t> initial_bytes() const;
};

/// Packs every non-constant declaration in declaration order.
DataLayout layout_in_declaration_order(const kernel::CyclicProgram& program);

/// Packs by name. If that coincides with declaration order the names are
/// placed in reverse order instead, so the two layouts never match.
DataLayout layout_by_name(const kernel::CyclicProgram& program);

std::uint32_t load_le(const std::uint8_t* p, std::uint32_t bytes);
void store_le(std::uint8_t* p, std::uint32_t bytes, std::uint32_t value);

}  // namespace vigil::codegen
