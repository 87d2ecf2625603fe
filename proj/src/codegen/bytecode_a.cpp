#include "vigil/codegen/bytecode_a.hpp"

#include <algorithm>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::codegen {

using text::hex;

using kernel::CyclicProgram;
using kernel::Expr;
using kernel::ExprKind;
using kernel::Stmt;
using kernel::StmtKind;
using kernel::Width;

std::uint32_t size_of(OpA op) {
  switch (op) {
    case OpA::Frame: return 2;
    case OpA::Push: return 5;
    case OpA::Ld8: case OpA::Ld16: case OpA::Ld32:
    case OpA::St8: case OpA::St16: case OpA::St32: return 3;
    case OpA::MAdd: case OpA::MSub: case OpA::MMul: return 2;
    case OpA::And: case OpA::Or: case OpA::Xor: return 1;
    case OpA::Brf: return 6;
    case OpA::Jmp: return 5;
    case OpA::Tick: case OpA::Since: case OpA::Halt: return 1;
  }
  return 0;
}

std::uint32_t size_of_a(std::uint8_t opcode) {
  switch (opcode) {
    case 0x01: case 0x10: case 0x11: case 0x12: case 0x13: case 0x14: case 0x15: case 0x16:
    case 0x20: case 0x21: case 0x22: case 0x23: case 0x24: case 0x25:
    case 0x30: case 0x31: case 0x40: case 0x41: case 0xFF:
      return size_of(static_cast<OpA>(opcode));
    default:
      return 0;
  }
}

namespace {

OpA load_op(Width w) { return w == Width::W8 ? OpA::Ld8 : w == Width::W16 ? OpA::Ld16 : OpA::Ld32; }
OpA store_op(Width w) { return w == Width::W8 ? OpA::St8 : w == Width::W16 ? OpA::St16 : OpA::St32; }

class Emitter {
 public:
  Emitter(const CyclicProgram& p, const DataLayout& layout) : p_(p), layout_(layout) {}

  std::vector<std::uint8_t> routine(const std::vector<Stmt>& body) {
    out_.clear();
    depth_ = max_ = 0;
    byte(static_cast<std::uint8_t>(OpA::Frame));
    byte(0);  // patched below
    block(body);
    byte(static_cast<std::uint8_t>(OpA::Halt));
    if (out_.size() == 3) return {};  // nothing but FRAME and HALT
    out_[1] = static_cast<std::uint8_t>(max_);
    return out_;
  }

  int max_depth() const { return max_; }

 private:
  void byte(std::uint8_t b) { out_.push_back(b); }
  void u16(std::uint32_t v) {
    byte(static_cast<std::uint8_t>(v));
    byte(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void patch32(std::size_t at, std::uint32_t v) { store_le(out_.data() + at, 4, v); }

  void push(int n) {
    depth_ += n;
    if (depth_ > kMaxStackDepthA) {
      throw Error("E_STACK_BOUND", "expression needs more than " + std::to_string(kMaxStackDepthA) + " stack slots");
    }
    max_ = std::max(max_, depth_);
  }
  void pop(int n) { depth_ -= n; }

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Literal:
        byte(static_cast<std::uint8_t>(OpA::Push));
        u32(static_cast<std::uint32_t>(e.value));
        push(1);
        return;
      case ExprKind::Var: {
        const auto& d = p_.decl(e.name);
        if (d.kind == kernel::VarKind::Constant) {
          byte(static_cast<std::uint8_t>(OpA::Push));
          u32(static_cast<std::uint32_t>(d.init));
        } else {
          const DataSlot* s = layout_.find(e.name);
          byte(static_cast<std::uint8_t>(load_op(s->type.width)));
          u16(s->offset);
        }
        push(1);
        return;
      }
      case ExprKind::ModArith:
        expr(e.args[0]);
        expr(e.args[1]);
        byte(static_cast<std::uint8_t>(OpA::MAdd) + static_cast<std::uint8_t>(e.arith));
        byte(static_cast<std::uint8_t>(e.width));
        pop(1);
        return;
      case ExprKind::Bitwise:
        expr(e.args[0]);
        expr(e.args[1]);
        byte(static_cast<std::uint8_t>(OpA::And) + static_cast<std::uint8_t>(e.bit));
        pop(1);
        return;
      case ExprKind::Tick:
        byte(static_cast<std::uint8_t>(OpA::Tick));
        push(1);
        return;
      case ExprKind::Since:
        expr(e.args[0]);
        byte(static_cast<std::uint8_t>(OpA::Since));
        return;
      default:
        throw Error("E_INTERNAL", "expression kind not compilable; program was not validated");
    }
  }

  void block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::Local:
          break;
        case StmtKind::Assign: {
          expr(s.value);
          const DataSlot* slot = layout_.find(s.target);
          byte(static_cast<std::uint8_t>(store_op(slot->type.width)));
          u16(slot->offset);
          pop(1);
          break;
        }
        case StmtKind::If: {
          expr(s.cond.args[0]);
          expr(s.cond.args[1]);
          byte(static_cast<std::uint8_t>(OpA::Brf));
          byte(static_cast<std::uint8_t>(s.cond.cmp));
          std::size_t rel_at = out_.size();
          u32(0);
          pop(2);
          block(s.then_body);
          if (s.else_body.empty()) {
            patch32(rel_at, static_cast<std::uint32_t>(out_.size() - (rel_at + 4)));
          } else {
            byte(static_cast<std::uint8_t>(OpA::Jmp));
            std::size_t jmp_at = out_.size();
            u32(0);
            patch32(rel_at, static_cast<std::uint32_t>(out_.size() - (rel_at + 4)));
            block(s.else_body);
            patch32(jmp_at, static_cast<std::uint32_t>(out_.size() - (jmp_at + 4)));
          }
          break;
        }
      }
    }
  }

  const CyclicProgram& p_;
  const DataLayout& layout_;
  std::vector<std::uint8_t> out_;
  int depth_ = 0;
  int max_ = 0;
};

}  // namespace

BytecodeA compile_a(const CyclicProgram& program) {
  BytecodeA bc;
  bc.layout = layout_in_declaration_order(program);
  Emitter em(program, bc.layout);
  bc.code = em.routine(program.init);
  bc.max_stack = em.max_depth();
  bc.cycle_entry = static_cast<std::uint32_t>(bc.code.size());
  auto cycle = em.routine(program.logic);
  bc.max_stack = std::max(bc.max_stack, em.max_depth());
  bc.code.insert(bc.code.end(), cycle.begin(), cycle.end());
  return bc;
}

std::vector<InstrA> decode_a(std::span<const std::uint8_t> code, std::uint32_t begin, std::uint32_t end) {
  std::vector<InstrA> out;
  if (end > code.size()) throw Error("E_BAD_OPCODE", "routine extends past the code segment");
  std::uint32_t pc = begin;
  while (pc < end) {
    std::uint32_t n = size_of_a(code[pc]);
    if (n == 0) throw Error("E_BAD_OPCODE", "unknown opcode 0x" + hex(code[pc], 2) + " at " + std::to_string(pc));
    if (pc + n > end) throw Error("E_BAD_OPCODE", "truncated instruction at " + std::to_string(pc));
    InstrA in;
    in.op = static_cast<OpA>(code[pc]);
    in.pos = pc;
    const std::uint8_t* p = code.data() + pc + 1;
    switch (in.op) {
      case OpA::Frame: case OpA::MAdd: case OpA::MSub: case OpA::MMul: in.operand = p[0]; break;
      case OpA::Push: case OpA::Jmp: in.operand = load_le(p, 4); break;
      case OpA::Brf: in.cmp = p[0]; in.operand = load_le(p + 1, 4); break;
      case OpA::Ld8: case OpA::Ld16: case OpA::Ld32:
      case OpA::St8: case OpA::St16: case OpA::St32: in.operand = load_le(p, 2); break;
      default: break;
    }
    out.push_back(in);
    pc += n;
  }
  return out;
}

std::string format_instr(const InstrA& in) {
  static const char* kCmp[] = {"EQ", "NE", "LT", "LE", "GT", "GE"};
  auto target = [&](std::uint32_t n) { return std::to_string(in.pos + n + in.operand); };
  switch (in.op) {
    case OpA::Frame: return "FRAME " + std::to_string(in.operand);
    case OpA::Push: return "PUSH " + std::to_string(in.operand);
    case OpA::Ld8: return "LD8 [" + std::to_string(in.operand) + "]";
    case OpA::Ld16: return "LD16 [" + std::to_string(in.operand) + "]";
    case OpA::Ld32: return "LD32 [" + std::to_string(in.operand) + "]";
    case OpA::St8: return "ST8 [" + std::to_string(in.operand) + "]";
    case OpA::St16: return "ST16 [" + std::to_string(in.operand) + "]";
    case OpA::St32: return "ST32 [" + std::to_string(in.operand) + "]";
    case OpA::MAdd: return "MADD " + std::to_string(in.operand);
    case OpA::MSub: return "MSUB " + std::to_string(in.operand);
    case OpA::MMul: return "MMUL " + std::to_string(in.operand);
    case OpA::And: return "AND";
    case OpA::Or: return "OR";
    case OpA::Xor: return "XOR";
    case OpA::Brf: return std::string("BRF ") + (in.cmp < 6 ? kCmp[in.cmp] : "??") + " -> " + target(6);
    case OpA::Jmp: return "JMP -> " + target(5);
    case OpA::Tick: return "TICK";
    case OpA::Since: return "SINCE";
    case OpA::Halt: return "HALT";
  }
  return "?";
}

std::string listing_a(const BytecodeA& bc) {
  std::string out = "; binary A (stack), max depth " + std::to_string(bc.max_stack) + "\n";
  out += "; data\n";
  for (const auto& s : bc.layout.slots) {
    out += ";   " + std::to_string(s.offset) + " " + s.name + " : " + kernel::type_name(s.type) + "\n";
  }
  auto dump = [&](const char* title, std::uint32_t b, std::uint32_t e) {
    out += std::string(title) + ":\n";
    for (const auto& in : decode_a(bc.code, b, e)) out += "  " + hex(in.pos, 4) + "  " + format_instr(in) + "\n";
  };
  dump("init", 0, bc.cycle_entry);
  dump("cycle", bc.cycle_entry, static_cast<std::uint32_t>(bc.code.size()));
  return out;
}

}  // namespace vigil::codegen
