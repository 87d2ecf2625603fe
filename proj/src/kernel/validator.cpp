#include "vigil/kernel/validator.hpp"

#include <algorithm>
#include <set>

namespace vigil::kernel {
namespace {

struct Ty {
  enum Kind { Value, Literal, Bool, Bad } kind = Bad;
  Width width = Width::W8;
  std::uint64_t value = 0;
};

Ty value_of(Width w) { return {Ty::Value, w, 0}; }

class Validator {
 public:
  explicit Validator(const CyclicProgram& p) : p_(p) {}

  ValidationReport run() {
    declarations();
    block_start();
    for (const auto& s : p_.init) stmt(s);
    block_start();
    for (const auto& s : p_.logic) stmt(s);
    std::stable_sort(report_.errors.begin(), report_.errors.end(), [](const auto& a, const auto& b) {
      return a.loc.line != b.loc.line ? a.loc.line < b.loc.line : a.loc.col < b.loc.col;
    });
    return std::move(report_);
  }

 private:
  void err(int row, std::string code, SourceLoc loc, std::string msg) {
    report_.errors.push_back({row, std::move(code), loc, std::move(msg)});
  }
  void type_err(SourceLoc loc, std::string msg) { err(kRowImplTyping, "E_TYPE", loc, std::move(msg)); }

  void declarations() {
    std::set<std::string> names;
    std::set<int> in_pins;
    std::set<int> out_pins;
    int inputs = 0;
    int outputs = 0;
    for (const auto& d : p_.decls) {
      if (!names.insert(d.name).second) {
        err(d.kind == VarKind::Local ? kRowImplTyping : kRowSpecTyping, "E_TYPE", d.loc,
            "duplicate declaration of '" + d.name + "'");
      }
      if (d.kind == VarKind::Local) {
        if (!d.type_spelling.empty() && !d.type) {
          type_err(d.loc, "unknown type '" + d.type_spelling + "' (expected u8, u16, u32 or io)");
        } else if (d.type) {
          report_.local_types[d.name] = *d.type;
        }
        continue;
      }
      if (!d.type) {
        err(kRowSpecTyping, "E_TYPE", d.loc, "unknown type '" + d.type_spelling + "' (expected u8, u16, u32 or io)");
        continue;
      }
      const ScalarType t = *d.type;
      bool is_io_kind = d.kind == VarKind::Input || d.kind == VarKind::Output;
      if (is_io_kind && !t.io) {
        err(kRowSpecTyping, "E_TYPE", d.loc, std::string(kind_name(d.kind)) + " '" + d.name + "' must have type io");
      }
      if (d.kind == VarKind::Constant && !d.has_init) {
        err(kRowSpecTyping, "E_TYPE", d.loc, "constant '" + d.name + "' has no value");
      }
      if (d.has_init && d.init > mask_of(t.width)) {
        err(kRowSpecTyping, "E_TYPE", d.loc,
            "value " + std::to_string(d.init) + " does not fit in " + type_name(t));
      } else if (d.has_init && t.io && !is_io_code(static_cast<std::uint32_t>(d.init))) {
        err(kRowSpecTyping, "E_TYPE", d.loc, "io variable '" + d.name + "' must be initialised to IO_ON or IO_OFF");
      }
      if (d.kind == VarKind::Input) ++inputs;
      if (d.kind == VarKind::Output) ++outputs;
      if (d.pin != 0) {
        if (!is_io_kind) {
          err(kRowSpecTyping, "E_TYPE", d.loc, "only inputs and outputs can be bound to a pin");
        } else {
          int limit = d.kind == VarKind::Input ? p_.io.inputs : p_.io.outputs;
          auto& used = d.kind == VarKind::Input ? in_pins : out_pins;
          if (d.pin < 1 || d.pin > limit) {
            err(kRowSpecTyping, "E_TYPE", d.loc,
                "pin " + std::to_string(d.pin) + " outside 1.." + std::to_string(limit));
          } else if (!used.insert(d.pin).second) {
            err(kRowSpecTyping, "E_TYPE", d.loc, "pin " + std::to_string(d.pin) + " bound twice");
          }
        }
      }
    }
    if (inputs > p_.io.inputs) {
      err(kRowSpecTyping, "E_TYPE", {1, 1},
          std::to_string(inputs) + " inputs declared but the board has " + std::to_string(p_.io.inputs));
    }
    if (outputs > p_.io.outputs) {
      err(kRowSpecTyping, "E_TYPE", {1, 1},
          std::to_string(outputs) + " outputs declared but the board has " + std::to_string(p_.io.outputs));
    }
  }

  void block_start() { assigned_.clear(); }

  const VarDecl* lookup(const std::string& name) const {
    int i = p_.find(name);
    return i < 0 ? nullptr : &p_.decls[static_cast<std::size_t>(i)];
  }

  // Unifies two operand types for bitwise ops and comparisons.
  Ty unify(const Ty& a, const Ty& b, SourceLoc loc, std::string_view what) {
    if (a.kind == Ty::Bad || b.kind == Ty::Bad) return {};
    if (a.kind == Ty::Bool || b.kind == Ty::Bool) {
      type_err(loc, "comparison used as a value in " + std::string(what));
      return {};
    }
    if (a.kind == Ty::Literal && b.kind == Ty::Literal) return {Ty::Literal, Width::W32, 0};
    if (a.kind == Ty::Value && b.kind == Ty::Value) {
      if (a.width != b.width) {
        type_err(loc, "operand widths differ in " + std::string(what) + " (u" +
                          std::to_string(static_cast<int>(a.width)) + " vs u" +
                          std::to_string(static_cast<int>(b.width)) + ")");
        return {};
      }
      return a;
    }
    const Ty& v = a.kind == Ty::Value ? a : b;
    const Ty& lit = a.kind == Ty::Literal ? a : b;
    if (lit.value > mask_of(v.width)) {
      type_err(loc, "literal " + std::to_string(lit.value) + " does not fit in u" +
                        std::to_string(static_cast<int>(v.width)));
      return {};
    }
    return v;
  }

  Ty expr(const Expr& e, bool condition_top = false) {
    switch (e.kind) {
      case ExprKind::Literal:
        return {Ty::Literal, Width::W32, e.value};
      case ExprKind::Var: {
        const VarDecl* d = lookup(e.name);
        if (!d) {
          type_err(e.loc, "unknown identifier '" + e.name + "'");
          return {};
        }
        if (d->kind == VarKind::Output) {
          type_err(e.loc, "output '" + e.name + "' is write-only");
          return {};
        }
        if (d->kind == VarKind::Local) {
          auto t = report_.local_types.find(e.name);
          if (!assigned_.count(e.name) || t == report_.local_types.end()) {
            err(kRowUntypedLocal, "E_UNTYPED_LOCAL", e.loc, "local '" + e.name + "' read before it is assigned");
            return {};
          }
          return value_of(t->second.width);
        }
        if (!d->type) return {};
        return value_of(d->type->width);
      }
      case ExprKind::ModArith: {
        if (e.args.size() != 2) {
          type_err(e.loc, "'" + e.name + "' takes two arguments");
          return {};
        }
        bool bad = false;
        for (const auto& a : e.args) {
          Ty t = expr(a);
          if (t.kind == Ty::Bad) {
            bad = true;
          } else if (t.kind == Ty::Bool) {
            type_err(a.loc, "comparison used as a value");
            bad = true;
          } else if (t.kind == Ty::Value && t.width != e.width) {
            type_err(a.loc, "argument of '" + e.name + "' has width u" + std::to_string(static_cast<int>(t.width)));
            bad = true;
          } else if (t.kind == Ty::Literal && t.value > mask_of(e.width)) {
            type_err(a.loc, "literal " + std::to_string(t.value) + " does not fit in u" +
                                std::to_string(static_cast<int>(e.width)));
            bad = true;
          }
        }
        return bad ? Ty{} : value_of(e.width);
      }
      case ExprKind::RawArith: {
        static const char* kSym[] = {"+", "-", "*"};
        static const char* kFn[] = {"add", "sub", "mul"};
        auto i = static_cast<std::size_t>(e.arith);
        err(kRowOverflowOp, "E_OVERFLOW_OP", e.loc,
            std::string("operator '") + kSym[i] + "' may overflow; use " + kFn[i] + "_u8/u16/u32");
        for (const auto& a : e.args) expr(a);
        return {};
      }
      case ExprKind::Bitwise: {
        Ty a = expr(e.args[0]);
        Ty b = expr(e.args[1]);
        return unify(a, b, e.loc, "bitwise operation");
      }
      case ExprKind::Compare: {
        if (!condition_top) {
          type_err(e.loc, "comparison used as a value");
          expr(e.args[0]);
          expr(e.args[1]);
          return {};
        }
        Ty a = expr(e.args[0]);
        Ty b = expr(e.args[1]);
        Ty u = unify(a, b, e.loc, "comparison");
        if (u.kind == Ty::Bad && a.kind != Ty::Bad && b.kind != Ty::Bad) return {};
        return {Ty::Bool, Width::W8, 0};
      }
      case ExprKind::Logical: {
        err(kRowMultiCond, "E_MULTI_COND", e.loc, "condition combines several terms; use nested IF statements");
        terms(e);
        return {Ty::Bool, Width::W8, 0};
      }
      case ExprKind::Tick:
        if (!e.args.empty()) type_err(e.loc, "get_ms_tick takes no arguments");
        return value_of(Width::W32);
      case ExprKind::Since: {
        if (e.args.size() != 1) {
          type_err(e.loc, "since takes one argument");
          return {};
        }
        Ty t = expr(e.args[0]);
        if (t.kind == Ty::Value && t.width != Width::W32) {
          type_err(e.args[0].loc, "since expects a u32 tick value");
        } else if (t.kind == Ty::Bool) {
          type_err(e.args[0].loc, "comparison used as a value");
        }
        return value_of(Width::W32);
      }
      case ExprKind::Call:
        type_err(e.loc, "unknown function '" + e.name + "'");
        for (const auto& a : e.args) expr(a);
        return {};
    }
    return {};
  }

  // Checks the terms of an and/or chain without reporting the chain twice.
  void terms(const Expr& e) {
    for (const auto& a : e.args) {
      if (a.kind == ExprKind::Logical) {
        terms(a);
      } else {
        expr(a, a.kind == ExprKind::Compare);
      }
    }
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Local:
        assigned_.erase(s.target);
        return;
      case StmtKind::Assign: {
        Ty v = expr(s.value);
        const VarDecl* d = lookup(s.target);
        if (!d) {
          type_err(s.loc, "unknown identifier '" + s.target + "'");
          return;
        }
        if (d->kind == VarKind::Input) {
          type_err(s.loc, "input '" + s.target + "' is read-only");
          return;
        }
        if (d->kind == VarKind::Constant) {
          type_err(s.loc, "constant '" + s.target + "' cannot be assigned");
          return;
        }
        if (v.kind == Ty::Bool) {
          type_err(s.value.loc, "comparison used as a value");
          return;
        }
        std::optional<ScalarType> target;
        if (d->kind == VarKind::Local) {
          auto it = report_.local_types.find(s.target);
          if (it != report_.local_types.end()) {
            target = it->second;
          } else if (v.kind == Ty::Value) {
            report_.local_types[s.target] = ScalarType{v.width, false};
            target = report_.local_types[s.target];
          } else if (v.kind == Ty::Literal) {
            err(kRowUntypedLocal, "E_UNTYPED_LOCAL", s.loc,
                "type of local '" + s.target + "' cannot be inferred from a literal; declare it with a type");
          }
          if (v.kind != Ty::Bad) assigned_.insert(s.target);
        } else {
          target = d->type;
        }
        if (!target || v.kind == Ty::Bad) return;
        if (v.kind == Ty::Value && v.width != target->width) {
          type_err(s.loc, "cannot assign u" + std::to_string(static_cast<int>(v.width)) + " value to '" + s.target +
                              "' of type " + type_name(*target));
        } else if (v.kind == Ty::Literal && v.value > mask_of(target->width)) {
          type_err(s.loc, "literal " + std::to_string(v.value) + " does not fit in '" + s.target + "' (" +
                              type_name(*target) + ")");
        }
        return;
      }
      case StmtKind::If: {
        if (s.cond.kind == ExprKind::Compare || s.cond.kind == ExprKind::Logical) {
          expr(s.cond, true);
        } else {
          type_err(s.cond.loc, "IF condition must be a single comparison");
          expr(s.cond);
        }
        auto before = assigned_;
        for (const auto& t : s.then_body) stmt(t);
        auto after_then = assigned_;
        assigned_ = before;
        for (const auto& t : s.else_body) stmt(t);
        std::set<std::string> both;
        for (const auto& n : after_then) {
          if (assigned_.count(n)) both.insert(n);
        }
        assigned_ = std::move(both);
        return;
      }
    }
  }

  const CyclicProgram& p_;
  ValidationReport report_;
  std::set<std::string> assigned_;
};

}  // namespace

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.code == code; });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& e : errors) {
    out += "ROW" + std::to_string(e.row) + " " + e.code + " " + std::to_string(e.loc.line) + ":" +
           std::to_string(e.loc.col) + " " + e.message + "\n";
  }
  return out;
}

ValidationReport validate(const CyclicProgram& program) { return Validator(program).run(); }

ValidationFailure::ValidationFailure(ValidationReport report)
    : Error(report.errors.empty() ? "E_TYPE" : report.errors.front().code, report.to_string()),
      report_(std::move(report)) {}

CyclicProgram prepare(CyclicProgram program) {
  auto report = validate(program);
  if (!report.ok()) throw ValidationFailure(std::move(report));
  std::set<int> in_used;
  std::set<int> out_used;
  for (auto& d : program.decls) {
    if (d.kind == VarKind::Local) {
      auto it = report.local_types.find(d.name);
      // A local that is declared but never assigned has no inferable type; it is dead.
      d.type = it != report.local_types.end() ? it->second : ScalarType{Width::W8, false};
    }
    if (d.pin != 0) (d.kind == VarKind::Input ? in_used : out_used).insert(d.pin);
  }
  for (auto& d : program.decls) {
    if (d.pin != 0 || (d.kind != VarKind::Input && d.kind != VarKind::Output)) continue;
    auto& used = d.kind == VarKind::Input ? in_used : out_used;
    int pin = 1;
    while (used.count(pin)) ++pin;
    d.pin = pin;
    used.insert(pin);
  }
  for (auto& d : program.decls) {
    if (!d.has_init && d.type && d.type->io) {
      d.init = kIoOff;
    }
  }
  return program;
}

}  // namespace vigil::kernel
