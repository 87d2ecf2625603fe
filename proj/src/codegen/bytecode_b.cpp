#include "vigil/codegen/bytecode_b.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::codegen {

using kernel::CyclicProgram;
using kernel::Expr;
using kernel::ExprKind;
using kernel::Stmt;
using kernel::StmtKind;
using text::hex;

namespace {

class TacLowering {
 public:
  TacLowering(const CyclicProgram& p, const DataLayout& layout) : p_(p), layout_(layout) {}

  TacRoutine routine(const std::vector<Stmt>& body) {
    r_ = TacRoutine{};
    block(body);
    return std::move(r_);
  }

 private:
  int emit(TacInstr in, bool defines = true) {
    if (defines) in.dst = r_.temps++;
    r_.code.push_back(in);
    return in.dst;
  }

  int expr(const Expr& e) {
    TacInstr in;
    switch (e.kind) {
      case ExprKind::Literal:
        in.op = TacOp::Const;
        in.imm = static_cast<std::uint32_t>(e.value);
        return emit(in);
      case ExprKind::Var: {
        const auto& d = p_.decl(e.name);
        if (d.kind == kernel::VarKind::Constant) {
          in.op = TacOp::Const;
          in.imm = static_cast<std::uint32_t>(d.init);
        } else {
          const DataSlot* s = layout_.find(e.name);
          in.op = TacOp::Load;
          in.imm = s->offset;
          in.width = s->type.width;
        }
        return emit(in);
      }
      case ExprKind::ModArith:
        in.op = TacOp::Arith;
        in.a = expr(e.args[0]);
        in.b = expr(e.args[1]);
        in.arith = e.arith;
        in.width = e.width;
        return emit(in);
      case ExprKind::Bitwise:
        in.op = TacOp::Bit;
        in.a = expr(e.args[0]);
        in.b = expr(e.args[1]);
        in.bit = e.bit;
        return emit(in);
      case ExprKind::Tick:
        in.op = TacOp::Tick;
        return emit(in);
      case ExprKind::Since:
        in.op = TacOp::Since;
        in.a = expr(e.args[0]);
        return emit(in);
      default:
        throw Error("E_INTERNAL", "expression kind not compilable; program was not validated");
    }
  }

  void label(int id) {
    TacInstr in;
    in.op = TacOp::Label;
    in.imm = static_cast<std::uint32_t>(id);
    emit(in, false);
  }

  void block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::Local:
          break;
        case StmtKind::Assign: {
          TacInstr in;
          in.op = TacOp::Store;
          in.a = expr(s.value);
          const DataSlot* slot = layout_.find(s.target);
          in.imm = slot->offset;
          in.width = slot->type.width;
          emit(in, false);
          break;
        }
        case StmtKind::If: {
          int else_label = labels_++;
          TacInstr br;
          br.op = TacOp::BranchFalse;
          br.a = expr(s.cond.args[0]);
          br.b = expr(s.cond.args[1]);
          br.cmp = s.cond.cmp;
          br.imm = static_cast<std::uint32_t>(else_label);
          emit(br, false);
          block(s.then_body);
          if (s.else_body.empty()) {
            label(else_label);
          } else {
            int end_label = labels_++;
            TacInstr j;
            j.op = TacOp::Jump;
            j.imm = static_cast<std::uint32_t>(end_label);
            emit(j, false);
            label(else_label);
            block(s.else_body);
            label(end_label);
          }
          break;
        }
      }
    }
  }

  const CyclicProgram& p_;
  const DataLayout& layout_;
  TacRoutine r_;
  int labels_ = 0;
};

// Greedy allocator over one routine. Temps are single-assignment and never
// live across a label, so a linear scan with next-use spilling suffices.
class Allocator {
 public:
  Allocator(const TacRoutine& r, std::uint32_t base_index) : r_(r), base_(base_index) {
    uses_.resize(static_cast<std::size_t>(r.temps));
    for (std::size_t i = 0; i < r.code.size(); ++i) {
      for (int t : {r.code[i].a, r.code[i].b}) {
        if (t >= 0) uses_[static_cast<std::size_t>(t)].push_back(i);
      }
    }
    reg_of_.assign(static_cast<std::size_t>(r.temps), -1);
    slot_of_.assign(static_cast<std::size_t>(r.temps), -1);
    owner_.fill(-1);
  }

  std::vector<InstrB> run() {
    if (r_.code.empty()) return {};
    for (i_ = 0; i_ < r_.code.size(); ++i_) step(r_.code[i_]);
    out_.push_back({OpB::Ret, 0, 0, 0, 0});
    for (auto [at, label] : patches_) out_[at].imm = (base_ + label_at_.at(label)) * kInstrSizeB;
    return std::move(out_);
  }

  std::uint32_t slots_used() const { return slot_high_; }

 private:
  std::size_t next_use(int t) const {
    for (std::size_t u : uses_[static_cast<std::size_t>(t)]) {
      if (u >= i_) return u;
    }
    return SIZE_MAX;
  }
  bool dies_here(int t) const { return uses_[static_cast<std::size_t>(t)].back() == i_; }

  std::uint8_t take_reg(std::uint32_t locked) {
    for (int r = 0; r < kRegistersB; ++r) {
      if (owner_[r] < 0 && !(locked & (1u << r))) return static_cast<std::uint8_t>(r);
    }
    int victim = -1;
    std::size_t far = 0;
    for (int r = 0; r < kRegistersB; ++r) {
      if (locked & (1u << r)) continue;
      std::size_t nu = next_use(owner_[r]);
      if (victim < 0 || nu > far) {
        victim = r;
        far = nu;
      }
    }
    if (victim < 0) throw Error("E_INTERNAL", "register allocator ran out of registers");
    int t = owner_[victim];
    std::uint32_t slot = alloc_slot();
    out_.push_back({OpB::Spl, 0, static_cast<std::uint8_t>(victim), 0, slot});
    slot_of_[static_cast<std::size_t>(t)] = static_cast<int>(slot);
    reg_of_[static_cast<std::size_t>(t)] = -1;
    owner_[victim] = -1;
    return static_cast<std::uint8_t>(victim);
  }

  std::uint32_t alloc_slot() {
    if (!free_slots_.empty()) {
      std::uint32_t s = free_slots_.back();
      free_slots_.pop_back();
      return s;
    }
    return slot_high_++;
  }

  std::uint8_t fetch(int t, std::uint32_t& locked) {
    auto& reg = reg_of_[static_cast<std::size_t>(t)];
    if (reg < 0) {
      std::uint8_t r = take_reg(locked);
      auto slot = static_cast<std::uint32_t>(slot_of_[static_cast<std::size_t>(t)]);
      out_.push_back({OpB::Fil, r, 0, 0, slot});
      free_slots_.push_back(slot);
      slot_of_[static_cast<std::size_t>(t)] = -1;
      reg = r;
      owner_[r] = t;
    }
    locked |= 1u << reg;
    return static_cast<std::uint8_t>(reg);
  }

  void release_dead(const TacInstr& in) {
    for (int t : {in.a, in.b}) {
      if (t < 0 || !dies_here(t)) continue;
      int r = reg_of_[static_cast<std::size_t>(t)];
      if (r >= 0) owner_[r] = -1;
      reg_of_[static_cast<std::size_t>(t)] = -1;
    }
  }

  std::uint8_t define(int t) {
    std::uint8_t r = take_reg(0);
    owner_[r] = t;
    reg_of_[static_cast<std::size_t>(t)] = r;
    return r;
  }

  void step(const TacInstr& in) {
    std::uint32_t locked = 0;
    for (int t : {in.a, in.b}) {
      if (t >= 0 && reg_of_[static_cast<std::size_t>(t)] >= 0) locked |= 1u << reg_of_[static_cast<std::size_t>(t)];
    }
    std::uint8_t ra = in.a >= 0 ? fetch(in.a, locked) : 0;
    std::uint8_t rb = in.b >= 0 ? fetch(in.b, locked) : 0;
    release_dead(in);
    auto w = static_cast<std::uint32_t>(in.width);
    switch (in.op) {
      case TacOp::Const:
        out_.push_back({OpB::Ldi, define(in.dst), 0, 0, in.imm});
        break;
      case TacOp::Load:
        out_.push_back({OpB::Ldm, define(in.dst), static_cast<std::uint8_t>(w), 0, in.imm});
        break;
      case TacOp::Arith:
        out_.push_back({static_cast<OpB>(static_cast<std::uint8_t>(OpB::Add) + static_cast<std::uint8_t>(in.arith)),
                        define(in.dst), ra, rb, w});
        break;
      case TacOp::Bit:
        out_.push_back({static_cast<OpB>(static_cast<std::uint8_t>(OpB::And) + static_cast<std::uint8_t>(in.bit)),
                        define(in.dst), ra, rb, 0});
        break;
      case TacOp::Tick:
        out_.push_back({OpB::Tck, define(in.dst), 0, 0, 0});
        break;
      case TacOp::Since:
        out_.push_back({OpB::Snc, define(in.dst), ra, 0, 0});
        break;
      case TacOp::Store:
        out_.push_back({OpB::Stm, 0, ra, static_cast<std::uint8_t>(w), in.imm});
        break;
      case TacOp::BranchFalse:
        patches_.emplace_back(out_.size(), in.imm);
        out_.push_back({OpB::Brf, static_cast<std::uint8_t>(in.cmp), ra, rb, 0});
        break;
      case TacOp::Jump:
        patches_.emplace_back(out_.size(), in.imm);
        out_.push_back({OpB::Jmp, 0, 0, 0, 0});
        break;
      case TacOp::Label:
        label_at_[in.imm] = static_cast<std::uint32_t>(out_.size());
        break;
    }
  }

  const TacRoutine& r_;
  std::uint32_t base_;
  std::size_t i_ = 0;
  std::vector<std::vector<std::size_t>> uses_;
  std::vector<int> reg_of_;
  std::vector<int> slot_of_;
  std::array<int, kRegistersB> owner_{};
  std::vector<std::uint32_t> free_slots_;
  std::uint32_t slot_high_ = 0;
  std::vector<InstrB> out_;
  std::vector<std::pair<std::size_t, std::uint32_t>> patches_;
  std::map<std::uint32_t, std::uint32_t> label_at_;
};

}  // namespace

TacProgram lower_to_tac(const CyclicProgram& program) {
  TacProgram tac;
  tac.layout = layout_by_name(program);
  TacLowering lower(program, tac.layout);
  tac.init = lower.routine(program.init);
  tac.cycle = lower.routine(program.logic);
  return tac;
}

std::string format_tac(const TacRoutine& r) {
  static const char* kArith[] = {"add", "sub", "mul"};
  static const char* kBit[] = {"and", "or", "xor"};
  auto t = [](int n) { return "t" + std::to_string(n); };
  std::string out;
  for (const auto& in : r.code) {
    auto w = std::to_string(static_cast<int>(in.width));
    switch (in.op) {
      case TacOp::Const: out += t(in.dst) + " = " + std::to_string(in.imm); break;
      case TacOp::Load: out += t(in.dst) + " = load" + w + " [" + std::to_string(in.imm) + "]"; break;
      case TacOp::Arith:
        out += t(in.dst) + " = " + kArith[static_cast<int>(in.arith)] + w + " " + t(in.a) + ", " + t(in.b);
        break;
      case TacOp::Bit: out += t(in.dst) + " = " + kBit[static_cast<int>(in.bit)] + " " + t(in.a) + ", " + t(in.b); break;
      case TacOp::Tick: out += t(in.dst) + " = tick"; break;
      case TacOp::Since: out += t(in.dst) + " = since " + t(in.a); break;
      case TacOp::Store: out += "store" + w + " [" + std::to_string(in.imm) + "] = " + t(in.a); break;
      case TacOp::BranchFalse:
        out += "ifnot " + t(in.a) + " " + std::string(kernel::cmp_symbol(in.cmp)) + " " + t(in.b) + " goto L" +
               std::to_string(in.imm);
        break;
      case TacOp::Jump: out += "goto L" + std::to_string(in.imm); break;
      case TacOp::Label: out += "L" + std::to_string(in.imm) + ":"; break;
    }
    out += "\n";
  }
  return out;
}

BytecodeB allocate_registers(const TacProgram& tac) {
  BytecodeB bc;
  bc.tac = tac;
  bc.layout = tac.layout;
  Allocator init(tac.init, 0);
  bc.code = init.run();
  bc.cycle_entry = static_cast<std::uint32_t>(bc.code.size()) * kInstrSizeB;
  Allocator cycle(tac.cycle, static_cast<std::uint32_t>(bc.code.size()));
  auto body = cycle.run();
  bc.code.insert(bc.code.end(), body.begin(), body.end());
  bc.spill_slots = std::max(init.slots_used(), cycle.slots_used());
  return bc;
}

BytecodeB compile_b(const CyclicProgram& program) { return allocate_registers(lower_to_tac(program)); }

bool is_valid_op_b(std::uint8_t op) {
  switch (op) {
    case 0x81: case 0x82: case 0x83: case 0x90: case 0x91: case 0x92: case 0x93: case 0x94: case 0x95:
    case 0xA0: case 0xA1: case 0xB0: case 0xB1: case 0xC0: case 0xC1: case 0xCF:
      return true;
    default:
      return false;
  }
}

std::vector<std::uint8_t> BytecodeB::encode() const {
  std::vector<std::uint8_t> out(code.size() * kInstrSizeB);
  for (std::size_t i = 0; i < code.size(); ++i) {
    std::uint8_t* p = out.data() + i * kInstrSizeB;
    p[0] = static_cast<std::uint8_t>(code[i].op);
    p[1] = code[i].rd;
    p[2] = code[i].ra;
    p[3] = code[i].rb;
    store_le(p + 4, 4, code[i].imm);
  }
  return out;
}

std::vector<InstrB> decode_b(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kInstrSizeB != 0) throw Error("E_BAD_OPCODE", "code length is not a multiple of 8");
  std::vector<InstrB> out;
  for (std::size_t at = 0; at < bytes.size(); at += kInstrSizeB) {
    const std::uint8_t* p = bytes.data() + at;
    if (!is_valid_op_b(p[0])) {
      throw Error("E_BAD_OPCODE", "unknown opcode 0x" + hex(p[0], 2) + " at " + std::to_string(at));
    }
    out.push_back({static_cast<OpB>(p[0]), p[1], p[2], p[3], load_le(p + 4, 4)});
  }
  return out;
}

std::string format_instr(const InstrB& in) {
  static const char* kCmp[] = {"EQ", "NE", "LT", "LE", "GT", "GE"};
  auto r = [](std::uint8_t n) { return "r" + std::to_string(n); };
  auto imm = std::to_string(in.imm);
  switch (in.op) {
    case OpB::Ldi: return "LDI " + r(in.rd) + ", " + imm;
    case OpB::Ldm: return "LDM" + std::to_string(in.ra) + " " + r(in.rd) + ", [" + imm + "]";
    case OpB::Stm: return "STM" + std::to_string(in.rb) + " [" + imm + "], " + r(in.ra);
    case OpB::Add: return "ADD" + imm + " " + r(in.rd) + ", " + r(in.ra) + ", " + r(in.rb);
    case OpB::Sub: return "SUB" + imm + " " + r(in.rd) + ", " + r(in.ra) + ", " + r(in.rb);
    case OpB::Mul: return "MUL" + imm + " " + r(in.rd) + ", " + r(in.ra) + ", " + r(in.rb);
    case OpB::And: return "AND " + r(in.rd) + ", " + r(in.ra) + ", " + r(in.rb);
    case OpB::Or: return "OR " + r(in.rd) + ", " + r(in.ra) + ", " + r(in.rb);
    case OpB::Xor: return "XOR " + r(in.rd) + ", " + r(in.ra) + ", " + r(in.rb);
    case OpB::Tck: return "TCK " + r(in.rd);
    case OpB::Snc: return "SNC " + r(in.rd) + ", " + r(in.ra);
    case OpB::Brf:
      return std::string("BRF ") + (in.rd < 6 ? kCmp[in.rd] : "??") + " " + r(in.ra) + ", " + r(in.rb) + " -> " + imm;
    case OpB::Jmp: return "JMP -> " + imm;
    case OpB::Spl: return "SPL " + r(in.ra) + " -> s" + imm;
    case OpB::Fil: return "FIL " + r(in.rd) + " <- s" + imm;
    case OpB::Ret: return "RET";
  }
  return "?";
}

std::string listing_b(const BytecodeB& bc) {
  std::string out = "; binary B (register), spill slots " + std::to_string(bc.spill_slots) + "\n";
  out += "; data\n";
  for (const auto& s : bc.layout.slots) {
    out += ";   " + std::to_string(s.offset) + " " + s.name + " : " + kernel::type_name(s.type) + "\n";
  }
  out += "; tac init\n" + format_tac(bc.tac.init) + "; tac cycle\n" + format_tac(bc.tac.cycle);
  for (std::size_t i = 0; i < bc.code.size(); ++i) {
    auto at = static_cast<std::uint32_t>(i * kInstrSizeB);
    if (at == 0 && bc.cycle_entry > 0) out += "init:\n";
    if (at == bc.cycle_entry) out += "cycle:\n";
    out += "  " + hex(at, 4) + "  " + format_instr(bc.code[i]) + "\n";
  }
  return out;
}

}  // namespace vigil::codegen
