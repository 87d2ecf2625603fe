#include "vigil/kernel/printer.hpp"

namespace vigil::kernel {
namespace {

std::string literal_text(std::uint64_t v) {
  if (v == kIoOn) return "IO_ON";
  if (v == kIoOff) return "IO_OFF";
  return std::to_string(v);
}

bool is_atom(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var:
    case ExprKind::Literal:
    case ExprKind::ModArith:
    case ExprKind::Tick:
    case ExprKind::Since:
    case ExprKind::Call:
      return true;
    default:
      return false;
  }
}

std::string operand(const Expr& e) { return is_atom(e) ? print_expr(e) : "(" + print_expr(e) + ")"; }

void print_block(const CyclicProgram& p, const std::vector<Stmt>& body, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& s : body) {
    switch (s.kind) {
      case StmtKind::Local: {
        out += pad + "local " + s.target;
        int i = p.find(s.target);
        if (i >= 0 && !p.decls[static_cast<std::size_t>(i)].type_spelling.empty()) {
          out += " : " + p.decls[static_cast<std::size_t>(i)].type_spelling;
        }
        out += "\n";
        break;
      }
      case StmtKind::Assign:
        out += pad + s.target + " := " + print_expr(s.value) + "\n";
        break;
      case StmtKind::If:
        out += pad + "if " + print_expr(s.cond) + "\n";
        print_block(p, s.then_body, depth + 1, out);
        if (!s.else_body.empty()) {
          out += pad + "else\n";
          print_block(p, s.else_body, depth + 1, out);
        }
        break;
    }
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var:
      return e.name;
    case ExprKind::Literal:
      return literal_text(e.value);
    case ExprKind::ModArith:
    case ExprKind::Tick:
    case ExprKind::Since:
    case ExprKind::Call: {
      std::string out = e.name + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(e.args[i]);
      }
      return out + ")";
    }
    case ExprKind::RawArith: {
      static const char* kSym[] = {" + ", " - ", " * "};
      return operand(e.args[0]) + kSym[static_cast<int>(e.arith)] + operand(e.args[1]);
    }
    case ExprKind::Bitwise: {
      static const char* kSym[] = {" & ", " | ", " ^ "};
      return operand(e.args[0]) + kSym[static_cast<int>(e.bit)] + operand(e.args[1]);
    }
    case ExprKind::Compare:
      return operand(e.args[0]) + " " + std::string(cmp_symbol(e.cmp)) + " " + operand(e.args[1]);
    case ExprKind::Logical:
      return operand(e.args[0]) + (e.logic == LogicOp::And ? " and " : " or ") + operand(e.args[1]);
  }
  return "?";
}

std::string print_program(const CyclicProgram& p) {
  std::string out;
  auto section = [&](const char* title, VarKind kind) {
    bool any = false;
    for (const auto& d : p.decls) {
      if (d.kind != kind) continue;
      if (!any) out += std::string(title) + "\n";
      any = true;
      out += "  " + d.name + " : " + d.type_spelling;
      if (d.has_init) out += " = " + literal_text(d.init);
      if (d.pin != 0) out += " @ " + std::to_string(d.pin);
      out += "\n";
    }
  };
  section("CONSTANTS", VarKind::Constant);
  section("INPUTS", VarKind::Input);
  section("OUTPUTS", VarKind::Output);
  section("STATE", VarKind::State);
  if (!p.init.empty()) {
    out += "INIT\n";
    print_block(p, p.init, 1, out);
  }
  if (!p.logic.empty()) {
    out += "LOGIC\n";
    print_block(p, p.logic, 1, out);
  }
  return out;
}

}  // namespace vigil::kernel
