#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vigil/codegen/layout.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::codegen {

// ---- stage one: three-address code over single-assignment temps ----

enum class TacOp : std::uint8_t { Const, Load, Arith, Bit, Tick, Since, Store, BranchFalse, Jump, Label };

struct TacInstr {
  TacOp op = TacOp::Const;
  int dst = -1;            // temp defined, or -1
  int a = -1;              // temp operands, or -1
  int b = -1;
  std::uint32_t imm = 0;   // Const value, Load/Store offset, label id
  kernel::Width width = kernel::Width::W8;  // Load/Store/Arith
  kernel::ArithOp arith = kernel::ArithOp::Add;
  kernel::BitOp bit = kernel::BitOp::And;
  kernel::CmpOp cmp = kernel::CmpOp::Eq;
};

struct TacRoutine {
  std::vector<TacInstr> code;
  int temps = 0;
};

struct TacProgram {
  TacRoutine init;
  TacRoutine cycle;
  DataLayout layout;  // by name
};

TacProgram lower_to_tac(const kernel::CyclicProgram& program);
std::string format_tac(const TacRoutine& r);

// ---- stage two: register machine, fixed 8-byte instructions ----
//   [op][rd][ra][rb][imm32 LE]
//   LDI rd,imm | LDM rd,[imm] width ra | STM ra,[imm] width rb
//   ADD/SUB/MUL rd,ra,rb width imm | AND/OR/XOR rd,ra,rb
//   TCK rd | SNC rd,ra (clock - ra)
//   BRF cmp=rd, ra, rb -> imm (absolute, forward) | JMP -> imm
//   SPL ra -> slot imm | FIL rd <- slot imm | RET

enum class OpB : std::uint8_t {
  Ldi = 0x81,
  Ldm = 0x82,
  Stm = 0x83,
  Add = 0x90,
  Sub = 0x91,
  Mul = 0x92,
  And = 0x93,
  Or = 0x94,
  Xor = 0x95,
  Tck = 0xA0,
  Snc = 0xA1,
  Brf = 0xB0,
  Jmp = 0xB1,
  Spl = 0xC0,
  Fil = 0xC1,
  Ret = 0xCF,
};

inline constexpr int kRegistersB = 8;
inline constexpr std::uint32_t kInstrSizeB = 8;

bool is_valid_op_b(std::uint8_t opcode);

struct InstrB {
  OpB op = OpB::Ret;
  std::uint8_t rd = 0, ra = 0, rb = 0;
  std::uint32_t imm = 0;
};

struct BytecodeB {
  std::vector<InstrB> code;  // [init routine][cycle routine]
  std::uint32_t cycle_entry = 0;  // byte offset
  DataLayout layout;
  std::uint32_t spill_slots = 0;  // 4-byte scratch words, outside the data segment
  TacProgram tac;

  std::vector<std::uint8_t> encode() const;
};

BytecodeB compile_b(const kernel::CyclicProgram& program);
/// Stage two alone.
BytecodeB allocate_registers(const TacProgram& tac);

/// Throws Error E_BAD_OPCODE on unknown opcodes or a ragged length.
std::vector<InstrB> decode_b(std::span<const std::uint8_t> bytes);
std::string format_instr(const InstrB& in);
std::string listing_b(const BytecodeB& bc);

}  // namespace vigil::codegen
