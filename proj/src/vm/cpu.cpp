#include "vigil/vm/cpu.hpp"

#include <array>
#include <string>

#include "vigil/codegen/bytecode_a.hpp"
#include "vigil/codegen/bytecode_b.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/kernel/interpreter.hpp"

namespace vigil::vm {

using codegen::load_le;
using codegen::OpA;
using codegen::OpB;
using codegen::store_le;
using kernel::ArithOp;
using kernel::CmpOp;
using kernel::Width;

namespace {

[[noreturn]] void trap(const std::string& what, std::uint32_t pc) {
  throw Error("E_TRAP", what + " at " + std::to_string(pc));
}

bool width_ok(std::uint32_t w) { return w == 8 || w == 16 || w == 32; }

std::uint32_t load(std::span<const std::uint8_t> data, std::uint32_t off, std::uint32_t bytes, std::uint32_t pc) {
  if (std::uint64_t{off} + bytes > data.size()) trap("data read out of bounds", pc);
  return load_le(data.data() + off, bytes);
}

void store(std::span<std::uint8_t> data, std::uint32_t off, std::uint32_t bytes, std::uint32_t v, std::uint32_t pc) {
  if (std::uint64_t{off} + bytes > data.size()) trap("data write out of bounds", pc);
  store_le(data.data() + off, bytes, v);
}

std::uint32_t bitop(std::uint8_t which, std::uint32_t a, std::uint32_t b) {
  return which == 0 ? (a & b) : which == 1 ? (a | b) : (a ^ b);
}

}  // namespace

void run_a(std::span<const std::uint8_t> code, std::uint32_t begin, std::uint32_t end, std::span<std::uint8_t> data,
           std::uint32_t clock) {
  if (begin == end) return;
  if (end > code.size() || begin > end) trap("routine outside code segment", begin);
  std::array<std::uint32_t, codegen::kMaxStackDepthA> stack{};
  int sp = 0;
  int limit = -1;  // set by FRAME
  std::uint32_t pc = begin;
  auto pop = [&]() {
    if (sp == 0) trap("stack underflow", pc);
    return stack[static_cast<std::size_t>(--sp)];
  };
  auto push = [&](std::uint32_t v) {
    if (sp >= limit) trap("stack overflow", pc);
    stack[static_cast<std::size_t>(sp++)] = v;
  };
  while (true) {
    if (pc >= end) trap("fell off routine end", pc);
    std::uint8_t opcode = code[pc];
    std::uint32_t n = codegen::size_of_a(opcode);
    if (n == 0) trap("illegal opcode", pc);
    if (pc + n > end) trap("truncated instruction", pc);
    const std::uint8_t* arg = code.data() + pc + 1;
    std::uint32_t next = pc + n;
    auto op = static_cast<OpA>(opcode);
    if ((pc == begin) != (op == OpA::Frame)) trap("FRAME must open the routine", pc);
    switch (op) {
      case OpA::Frame:
        if (arg[0] > codegen::kMaxStackDepthA) trap("frame too deep", pc);
        limit = arg[0];
        break;
      case OpA::Push: push(load_le(arg, 4)); break;
      case OpA::Ld8: push(load(data, load_le(arg, 2), 1, pc)); break;
      case OpA::Ld16: push(load(data, load_le(arg, 2), 2, pc)); break;
      case OpA::Ld32: push(load(data, load_le(arg, 2), 4, pc)); break;
      case OpA::St8: store(data, load_le(arg, 2), 1, pop(), pc); break;
      case OpA::St16: store(data, load_le(arg, 2), 2, pop(), pc); break;
      case OpA::St32: store(data, load_le(arg, 2), 4, pop(), pc); break;
      case OpA::MAdd:
      case OpA::MSub:
      case OpA::MMul: {
        if (!width_ok(arg[0])) trap("bad width", pc);
        std::uint32_t b = pop();
        std::uint32_t a = pop();
        push(kernel::eval_mod(static_cast<ArithOp>(opcode - static_cast<std::uint8_t>(OpA::MAdd)),
                              static_cast<Width>(arg[0]), a, b));
        break;
      }
      case OpA::And:
      case OpA::Or:
      case OpA::Xor: {
        std::uint32_t b = pop();
        std::uint32_t a = pop();
        push(bitop(static_cast<std::uint8_t>(opcode - static_cast<std::uint8_t>(OpA::And)), a, b));
        break;
      }
      case OpA::Brf: {
        if (arg[0] > static_cast<std::uint8_t>(CmpOp::Ge)) trap("bad comparison", pc);
        std::uint32_t rhs = pop();
        std::uint32_t lhs = pop();
        std::uint64_t target = std::uint64_t{next} + load_le(arg + 1, 4);
        if (target >= end) trap("branch out of routine", pc);
        if (!kernel::compare(static_cast<CmpOp>(arg[0]), lhs, rhs)) next = static_cast<std::uint32_t>(target);
        break;
      }
      case OpA::Jmp: {
        std::uint64_t target = std::uint64_t{next} + load_le(arg, 4);
        if (target >= end) trap("jump out of routine", pc);
        next = static_cast<std::uint32_t>(target);
        break;
      }
      case OpA::Tick: push(clock); break;
      case OpA::Since: push(clock - pop()); break;
      case OpA::Halt:
        if (sp != 0) trap("stack not empty at HALT", pc);
        return;
    }
    pc = next;
  }
}

void run_b(std::span<const std::uint8_t> code, std::uint32_t begin, std::uint32_t end, std::span<std::uint8_t> data,
           std::span<std::uint8_t> spill, std::uint32_t clock) {
  if (begin == end) return;
  if (end > code.size() || begin > end || begin % 8 || end % 8) trap("routine outside code segment", begin);
  std::array<std::uint32_t, codegen::kRegistersB> reg{};
  std::uint32_t pc = begin;
  auto r = [&](std::uint8_t i) -> std::uint32_t& {
    if (i >= codegen::kRegistersB) trap("bad register", pc);
    return reg[i];
  };
  auto jump_to = [&](std::uint32_t target) {
    if (target <= pc || target >= end || target % 8) trap("bad jump target", pc);
    return target;
  };
  while (true) {
    if (pc >= end) trap("fell off routine end", pc);
    const std::uint8_t* p = code.data() + pc;
    std::uint8_t rd = p[1], ra = p[2], rb = p[3];
    std::uint32_t imm = load_le(p + 4, 4);
    std::uint32_t next = pc + codegen::kInstrSizeB;
    if (!codegen::is_valid_op_b(p[0])) trap("illegal opcode", pc);
    switch (static_cast<OpB>(p[0])) {
      case OpB::Ldi: r(rd) = imm; break;
      case OpB::Ldm:
        if (!width_ok(ra)) trap("bad width", pc);
        r(rd) = load(data, imm, ra / 8u, pc);
        break;
      case OpB::Stm:
        if (!width_ok(rb)) trap("bad width", pc);
        store(data, imm, rb / 8u, r(ra), pc);
        break;
      case OpB::Add:
      case OpB::Sub:
      case OpB::Mul:
        if (!width_ok(imm)) trap("bad width", pc);
        r(rd) = kernel::eval_mod(static_cast<ArithOp>(p[0] - static_cast<std::uint8_t>(OpB::Add)),
                                 static_cast<Width>(imm), r(ra), r(rb));
        break;
      case OpB::And:
      case OpB::Or:
      case OpB::Xor:
        r(rd) = bitop(static_cast<std::uint8_t>(p[0] - static_cast<std::uint8_t>(OpB::And)), r(ra), r(rb));
        break;
      case OpB::Tck: r(rd) = clock; break;
      case OpB::Snc: r(rd) = clock - r(ra); break;
      case OpB::Brf:
        if (rd > static_cast<std::uint8_t>(CmpOp::Ge)) trap("bad comparison", pc);
        if (!kernel::compare(static_cast<CmpOp>(rd), r(ra), r(rb))) next = jump_to(imm);
        else jump_to(imm);
        break;
      case OpB::Jmp: next = jump_to(imm); break;
      case OpB::Spl:
        if (std::uint64_t{imm} * 4 + 4 > spill.size()) trap("spill slot out of range", pc);
        store_le(spill.data() + imm * 4, 4, r(ra));
        break;
      case OpB::Fil:
        if (std::uint64_t{imm} * 4 + 4 > spill.size()) trap("spill slot out of range", pc);
        r(rd) = load_le(spill.data() + imm * 4, 4);
        break;
      case OpB::Ret:
        return;
    }
    pc = next;
  }
}

}  // namespace vigil::vm
