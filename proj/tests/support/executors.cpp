#include "executors.hpp"

#include <stdexcept>

#include "vigil/vm/cpu.hpp"

namespace vigil::testing {

BinaryRunner::BinaryRunner(codegen::BytecodeA a) : is_a_(true), a_(std::move(a)) {
  code_ = a_.code;
  entry_ = a_.cycle_entry;
  layout_ = a_.layout;
  init();
}

BinaryRunner::BinaryRunner(codegen::BytecodeB b) : is_a_(false), b_(std::move(b)) {
  code_ = b_.encode();
  entry_ = b_.cycle_entry;
  layout_ = b_.layout;
  spill_.assign(std::size_t{b_.spill_slots} * 4, 0);
  init();
}

void BinaryRunner::init() {
  data_ = layout_.initial_bytes();
  if (is_a_) {
    vm::run_a(code_, 0, entry_, data_, 0);
  } else {
    vm::run_b(code_, 0, entry_, data_, spill_, 0);
  }
}

void BinaryRunner::cycle(const kernel::InputVector& pins, std::uint32_t clock) {
  for (const auto& s : layout_.slots) {
    if (s.kind == kernel::VarKind::Input) data_[s.offset] = pins[static_cast<std::size_t>(s.pin - 1)];
  }
  auto end = static_cast<std::uint32_t>(code_.size());
  if (is_a_) {
    vm::run_a(code_, entry_, end, data_, clock);
  } else {
    vm::run_b(code_, entry_, end, data_, spill_, clock);
  }
}

std::uint32_t BinaryRunner::value(const std::string& name) const {
  const auto* s = layout_.find(name);
  if (!s) throw std::out_of_range("no slot for " + name);
  return codegen::load_le(data_.data() + s->offset, kernel::bytes_of(s->type.width));
}

}  // namespace vigil::testing
