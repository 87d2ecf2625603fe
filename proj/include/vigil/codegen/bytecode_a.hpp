#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vigil/codegen/layout.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::codegen {

// Stack machine, variable-length encoding. Multi-byte operands little-endian.
//   FRAME d      01 d            declared max operand depth, first of a routine
//   PUSH imm     10 imm32
//   LDn/STn off  11..13/14..16 off16   n = 8, 16, 32
//   MADD/MSUB/MMUL w  20..22 w   w in {8,16,32}
//   AND/OR/XOR   23..25
//   BRF cmp rel  30 cmp rel32    pops rhs, lhs; jumps forward by rel if !(lhs cmp rhs)
//   JMP rel      31 rel32        forward only
//   TICK         40              pushes ms clock
//   SINCE        41              pops t, pushes clock - t
//   HALT         FF
enum class OpA : std::uint8_t {
  Frame = 0x01,
  Push = 0x10,
  Ld8 = 0x11,
  Ld16 = 0x12,
  Ld32 = 0x13,
  St8 = 0x14,
  St16 = 0x15,
  St32 = 0x16,
  MAdd = 0x20,
  MSub = 0x21,
  MMul = 0x22,
  And = 0x23,
  Or = 0x24,
  Xor = 0x25,
  Brf = 0x30,
  Jmp = 0x31,
  Tick = 0x40,
  Since = 0x41,
  Halt = 0xFF,
};

inline constexpr int kMaxStackDepthA = 32;

/// Encoded size of an instruction, or 0 for an unknown opcode byte.
std::uint32_t size_of(OpA op);
std::uint32_t size_of_a(std::uint8_t opcode);

struct InstrA {
  OpA op = OpA::Halt;
  std::uint32_t pos = 0;      // byte position in the code segment
  std::uint32_t operand = 0;  // imm, offset, width, depth or rel
  std::uint8_t cmp = 0;       // BRF only
};

struct BytecodeA {
  std::vector<std::uint8_t> code;  // [init routine][cycle routine]
  std::uint32_t cycle_entry = 0;
  DataLayout layout;               // declaration order
  int max_stack = 0;
};

/// Throws Error E_STACK_BOUND when an expression needs more than 32 slots.
BytecodeA compile_a(const kernel::CyclicProgram& program);

/// Throws Error E_BAD_OPCODE on an unknown or truncated instruction.
std::vector<InstrA> decode_a(std::span<const std::uint8_t> code, std::uint32_t begin, std::uint32_t end);

std::string format_instr(const InstrA& in);
std::string listing_a(const BytecodeA& bc);

}  // namespace vigil::codegen
