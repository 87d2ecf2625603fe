#include "vigil/kernel/interpreter.hpp"

#include <algorithm>
#include <unordered_map>

#include "vigil/common/error.hpp"

namespace vigil::kernel {

std::uint32_t eval_mod(ArithOp op, Width width, std::uint32_t lhs, std::uint32_t rhs) {
  const std::uint64_t a = lhs;
  const std::uint64_t b = rhs;
  std::uint64_t r = 0;
  switch (op) {
    case ArithOp::Add: r = a + b; break;
    case ArithOp::Sub: r = a - b; break;  // wraps in 64 bits; masking below gives mod 2^width
    case ArithOp::Mul: r = a * b; break;
  }
  return static_cast<std::uint32_t>(r & mask_of(width));
}

namespace {

class Machine {
 public:
  Machine(const CyclicProgram& p, VarStore& store, std::uint64_t clock) : p_(p), store_(store), clock_(clock) {
    for (std::size_t i = 0; i < p.decls.size(); ++i) index_.emplace(p.decls[i].name, i);
  }

  std::uint32_t eval(const Expr& e) {
    ++steps;
    switch (e.kind) {
      case ExprKind::Literal:
        return static_cast<std::uint32_t>(e.value);
      case ExprKind::Var:
        return store_[index(e.name)];
      case ExprKind::ModArith:
        return eval_mod(e.arith, e.width, eval(e.args[0]), eval(e.args[1]));
      case ExprKind::Bitwise: {
        std::uint32_t a = eval(e.args[0]);
        std::uint32_t b = eval(e.args[1]);
        switch (e.bit) {
          case BitOp::And: return a & b;
          case BitOp::Or: return a | b;
          case BitOp::Xor: return a ^ b;
        }
        return 0;
      }
      case ExprKind::Tick:
        return static_cast<std::uint32_t>(clock_);
      case ExprKind::Since:
        return static_cast<std::uint32_t>(clock_) - eval(e.args[0]);
      default:
        throw Error("E_INTERNAL", "expression kind not executable; program was not validated");
    }
  }

  void run(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::Local:
          break;
        case StmtKind::Assign: {
          std::size_t i = index(s.target);
          store_[i] = eval(s.value) & mask_of(p_.decls[i].type->width);
          ++steps;
          break;
        }
        case StmtKind::If: {
          ++steps;
          bool c = compare(s.cond.cmp, eval(s.cond.args[0]), eval(s.cond.args[1]));
          run(c ? s.then_body : s.else_body);
          break;
        }
      }
    }
  }

  std::size_t steps = 0;

 private:
  std::size_t index(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("E_INTERNAL", "unknown variable '" + name + "'");
    return it->second;
  }

  const CyclicProgram& p_;
  VarStore& store_;
  std::uint64_t clock_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::size_t expr_bound(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e.args) n += expr_bound(a);
  return n;
}

}  // namespace

VarStore initial_store(const CyclicProgram& program) {
  VarStore store(program.decls.size(), 0);
  for (std::size_t i = 0; i < program.decls.size(); ++i) {
    store[i] = static_cast<std::uint32_t>(program.decls[i].init);
  }
  Machine m(program, store, 0);
  m.run(program.init);
  return store;
}

CycleOutcome interpret_cycle(const CyclicProgram& program, const VarStore& state, const InputVector& inputs,
                             std::uint64_t ms_clock) {
  CycleOutcome out;
  out.store = state;
  for (std::size_t i = 0; i < program.decls.size(); ++i) {
    const auto& d = program.decls[i];
    if (d.kind == VarKind::Input) {
      auto pin = static_cast<std::size_t>(d.pin - 1);
      out.store[i] = pin < inputs.size() ? inputs[pin] : kIoOff;
    }
  }
  Machine m(program, out.store, ms_clock);
  m.run(program.logic);
  out.steps = m.steps;
  out.outputs.assign(static_cast<std::size_t>(program.io.outputs), kIoOff);
  for (std::size_t i = 0; i < program.decls.size(); ++i) {
    const auto& d = program.decls[i];
    if (d.kind != VarKind::Output) continue;
    auto v = out.store[i];
    out.outputs[static_cast<std::size_t>(d.pin - 1)] = static_cast<std::uint8_t>(v);
    if (!is_io_code(v)) out.vital_faults.push_back(d.name);
  }
  return out;
}

std::size_t static_step_bound(const std::vector<Stmt>& body) {
  std::size_t n = 0;
  for (const auto& s : body) {
    switch (s.kind) {
      case StmtKind::Local: break;
      case StmtKind::Assign: n += 1 + expr_bound(s.value); break;
      case StmtKind::If:
        n += 1 + expr_bound(s.cond.args[0]) + expr_bound(s.cond.args[1]) +
             std::max(static_step_bound(s.then_body), static_step_bound(s.else_body));
        break;
    }
  }
  return n;
}

}  // namespace vigil::kernel
