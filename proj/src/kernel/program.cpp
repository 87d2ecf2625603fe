#include "vigil/kernel/program.hpp"

#include "vigil/common/error.hpp"

namespace vigil::kernel {

std::string type_name(const ScalarType& t) {
  if (t.io) return "io";
  return "u" + std::to_string(static_cast<int>(t.width));
}

std::optional<ScalarType> parse_type_name(std::string_view name) {
  if (name == "io") return ScalarType{Width::W8, true};
  if (name == "u8") return ScalarType{Width::W8, false};
  if (name == "u16") return ScalarType{Width::W16, false};
  if (name == "u32") return ScalarType{Width::W32, false};
  return std::nullopt;
}

std::string_view kind_name(VarKind k) {
  switch (k) {
    case VarKind::Input: return "input";
    case VarKind::Output: return "output";
    case VarKind::State: return "state";
    case VarKind::Local: return "local";
    case VarKind::Constant: return "constant";
  }
  return "?";
}

std::string_view cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

bool compare(CmpOp op, std::uint32_t lhs, std::uint32_t rhs) {
  switch (op) {
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ge: return lhs >= rhs;
  }
  return false;
}

Expr Expr::var(std::string name, SourceLoc loc) {
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  e.loc = loc;
  return e;
}

Expr Expr::literal(std::uint64_t value, SourceLoc loc) {
  Expr e;
  e.kind = ExprKind::Literal;
  e.value = value;
  e.loc = loc;
  return e;
}

int CyclicProgram::find(std::string_view name) const {
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (decls[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const VarDecl& CyclicProgram::decl(std::string_view name) const {
  int i = find(name);
  if (i < 0) throw Error("E_TYPE", "unknown variable '" + std::string(name) + "'");
  return decls[static_cast<std::size_t>(i)];
}

}  // namespace vigil::kernel
