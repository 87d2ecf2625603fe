#include "vigil/sm/model.hpp"

#include <algorithm>

#include "vigil/common/error.hpp"

namespace vigil::sm {

namespace {

template <typename T, typename F>
int find_if_index(const std::vector<T>& v, F&& pred) {
  auto it = std::find_if(v.begin(), v.end(), pred);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

// Matches `name` or `Interface.name`.
bool qualified_match(const std::string& iface, const std::string& name, std::string_view q) {
  if (q == name) return true;
  return !iface.empty() && q.size() == iface.size() + 1 + name.size() && q.substr(0, iface.size()) == iface &&
         q[iface.size()] == '.' && q.substr(iface.size() + 1) == name;
}

std::string prefixed(const char* p, const std::string& iface, const std::string& name) {
  return std::string(p) + (iface.empty() ? "" : iface + "_") + name;
}

}  // namespace

int CyclicStateMachine::state(std::string_view n) const {
  return find_if_index(states, [&](const State& s) { return s.name == n; });
}

int CyclicStateMachine::clock(std::string_view n) const {
  return find_if_index(clocks, [&](const std::string& c) { return c == n; });
}

int SmModel::constant(std::string_view n) const {
  return find_if_index(constants, [&](const Constant& c) { return c.name == n; });
}

int SmModel::input(std::string_view n) const {
  return find_if_index(inputs, [&](const InputDecl& i) { return qualified_match(i.interface, i.name, n); });
}

int SmModel::operation(std::string_view n) const {
  return find_if_index(operations, [&](const Operation& o) { return qualified_match(o.interface, o.name, n); });
}

ConstValues resolve_constants(const SmModel& m, const ConstValues& overrides) {
  for (const auto& [name, v] : overrides) {
    if (m.constant(name) < 0) throw Error("E_CONST_RANGE", "no constant named '" + name + "'");
  }
  ConstValues out;
  for (const auto& c : m.constants) {
    auto it = overrides.find(c.name);
    std::optional<std::int64_t> v = it != overrides.end() ? std::optional(it->second) : c.value;
    if (!v) throw Error("E_CONST_RANGE", "constant '" + c.name + "' has no value; pass --const " + c.name + "=<v>");
    if (c.range && !c.range->contains(*v)) {
      throw Error("E_CONST_RANGE", "constant '" + c.name + "' = " + std::to_string(*v) + " violates " + c.name + ":" +
                                       std::to_string(c.range->lo) + ".." + std::to_string(c.range->hi));
    }
    out[c.name] = *v;
  }
  return out;
}

std::int64_t evaluate(const ValueExpr& e, const ConstValues& values) {
  switch (e.kind) {
    case ValueExpr::Kind::Literal:
      return e.literal;
    case ValueExpr::Kind::Constant: {
      auto it = values.find(e.name);
      if (it == values.end()) throw Error("E_CONST_RANGE", "constant '" + e.name + "' has no value");
      return it->second;
    }
    case ValueExpr::Kind::Binary: {
      std::int64_t a = evaluate(e.args[0], values);
      std::int64_t b = evaluate(e.args[1], values);
      switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
          if (b == 0) throw Error("E_CONST_RANGE", "division by zero in a constant expression");
          return a / b;
      }
    }
  }
  return 0;
}

std::string input_var(const InputDecl& in) { return prefixed("i_", in.interface, in.name); }

std::string invoke_var(const Operation& op) { return prefixed("o_", op.interface, op.name); }

std::string arg_var(const Operation& op, const Param& p, int bit) {
  return invoke_var(op) + "_" + p.name + "_" + std::to_string(bit);
}

int bits_for(const Range& r) {
  int bits = 0;
  while (bits < 32 && (std::int64_t{1} << bits) <= r.hi) ++bits;
  return std::max(bits, 1);
}

}  // namespace vigil::sm
