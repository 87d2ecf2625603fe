#include "vigil/codegen/layout.hpp"

#include <algorithm>

namespace vigil::codegen {

using kernel::VarKind;

const DataSlot* DataLayout::find(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::uint8_t> DataLayout::initial_bytes() const {
  std::vector<std::uint8_t> bytes(size, 0);
  for (const auto& s : slots) store_le(bytes.data() + s.offset, kernel::bytes_of(s.type.width), s.initial);
  return bytes;
}

namespace {

std::vector<const kernel::VarDecl*> variables(const kernel::CyclicProgram& p) {
  std::vector<const kernel::VarDecl*> out;
  for (const auto& d : p.decls) {
    if (d.kind != VarKind::Constant) out.push_back(&d);
  }
  return out;
}

DataLayout pack(const std::vector<const kernel::VarDecl*>& order) {
  DataLayout layout;
  for (const auto* d : order) {
    DataSlot s;
    s.name = d->name;
    s.kind = d->kind;
    s.type = d->type.value_or(kernel::ScalarType{});
    s.pin = d->pin;
    s.offset = layout.size;
    s.initial = static_cast<std::uint32_t>(d->init);
    layout.size += kernel::bytes_of(s.type.width);
    layout.slots.push_back(std::move(s));
  }
  return layout;
}

}  // namespace

DataLayout layout_in_declaration_order(const kernel::CyclicProgram& program) { return pack(variables(program)); }

DataLayout layout_by_name(const kernel::CyclicProgram& program) {
  auto decl_order = variables(program);
  auto order = decl_order;
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->name < b->name; });
  if (order.size() >= 2 && order == decl_order) std::reverse(order.begin(), order.end());
  return pack(order);
}

std::uint32_t load_le(const std::uint8_t* p, std::uint32_t bytes) {
  std::uint32_t v = 0;
  for (std::uint32_t i = 0; i < bytes; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

void store_le(std::uint8_t* p, std::uint32_t bytes, std::uint32_t value) {
  for (std::uint32_t i = 0; i < bytes; ++i) p[i] = static_cast<std::uint8_t>(value >> (8 * i));
}

}  // namespace vigil::codegen
