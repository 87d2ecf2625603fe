#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vigil::kernel {

// Only three unsigned widths exist. No signed types, no booleans.
enum class Width : std::uint8_t { W8 = 8, W16 = 16, W32 = 32 };

constexpr std::uint32_t mask_of(Width w) {
  return w == Width::W32 ? 0xFFFFFFFFu : ((1u << static_cast<unsigned>(w)) - 1u);
}

constexpr std::uint32_t bytes_of(Width w) { return static_cast<std::uint32_t>(w) / 8u; }

// Vital codes for I/O registers: complementary, Hamming distance 8.
inline constexpr std::uint8_t kIoOff = 0x55;
inline constexpr std::uint8_t kIoOn = 0xAA;

constexpr bool is_io_code(std::uint32_t v) { return v == kIoOff || v == kIoOn; }

struct ScalarType {
  Width width = Width::W8;
  bool io = false;  // 8-bit register restricted to {IO_OFF, IO_ON}

  friend bool operator==(const ScalarType&, const ScalarType&) = default;
};

std::string type_name(const ScalarType& t);
std::optional<ScalarType> parse_type_name(std::string_view name);

enum class VarKind : std::uint8_t { Input, Output, State, Local, Constant };

std::string_view kind_name(VarKind k);

struct SourceLoc {
  int line = 0;
  int col = 0;
};

struct VarDecl {
  std::string name;
  VarKind kind = VarKind::State;
  std::string type_spelling;       // as written; empty for untyped locals
  std::optional<ScalarType> type;  // resolved type, absent for unknown or untyped
  std::uint64_t init = 0;          // raw initializer / constant value
  bool has_init = false;
  int pin = 0;                     // 1-based; 0 = auto-assign
  SourceLoc loc;
};

enum class ExprKind : std::uint8_t { Var, Literal, ModArith, RawArith, Bitwise, Compare, Logical, Tick, Since, Call };
enum class ArithOp : std::uint8_t { Add, Sub, Mul };
enum class BitOp : std::uint8_t { And, Or, Xor };
enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp : std::uint8_t { And, Or };

std::string_view cmp_symbol(CmpOp op);
bool compare(CmpOp op, std::uint32_t lhs, std::uint32_t rhs);

struct Expr {
  ExprKind kind = ExprKind::Literal;
  SourceLoc loc;
  std::string name;         // Var, Call
  std::uint64_t value = 0;  // Literal
  ArithOp arith = ArithOp::Add;
  BitOp bit = BitOp::And;
  CmpOp cmp = CmpOp::Eq;
  LogicOp logic = LogicOp::And;
  Width width = Width::W8;  // ModArith
  std::vector<Expr> args;

  static Expr var(std::string name, SourceLoc loc = {});
  static Expr literal(std::uint64_t value, SourceLoc loc = {});
};

enum class StmtKind : std::uint8_t { Assign, If, Local };

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  SourceLoc loc;
  std::string target;  // Assign target, Local name
  Expr value;          // Assign
  Expr cond;           // If
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
};

struct IoConfig {
  int inputs = 20;
  int outputs = 8;

  friend bool operator==(const IoConfig&, const IoConfig&) = default;
};

/// The kernel IR. Declarations keep source order; that order is the
/// canonical variable order everywhere downstream.
struct CyclicProgram {
  std::vector<VarDecl> decls;
  std::vector<Stmt> init;
  std::vector<Stmt> logic;
  IoConfig io;

  int find(std::string_view name) const;
  const VarDecl& decl(std::string_view name) const;
};

/// Value of every declaration, indexed like CyclicProgram::decls.
using VarStore = std::vector<std::uint32_t>;
/// One code per pin, index = pin - 1.
using InputVector = std::vector<std::uint8_t>;
using OutputVector = std::vector<std::uint8_t>;

}  // namespace vigil::kernel
