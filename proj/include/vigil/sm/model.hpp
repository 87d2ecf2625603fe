#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/kernel/program.hpp"

namespace vigil::sm {

struct Range {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
};

struct Constant {
  std::string name;
  std::optional<Range> range;
  std::optional<std::int64_t> value;  // default from the file
  int line = 0;
};

struct InputDecl {
  std::string interface;  // may be empty
  std::string name;
  int line = 0;
};

struct Param {
  std::string name;
  Range range;
};

struct Operation {
  std::string interface;
  std::string name;
  std::vector<Param> params;
  int line = 0;
};

/// Integer expression over constants and literals, folded at translation.
struct ValueExpr {
  enum class Kind : std::uint8_t { Literal, Constant, Binary } kind = Kind::Literal;
  std::int64_t literal = 0;
  std::string name;
  char op = '+';  // + - * /
  std::vector<ValueExpr> args;
};

struct Atom {
  enum class Kind : std::uint8_t { InputOn, InputOff, Clock } kind = Kind::InputOn;
  int input = -1;
  int clock = -1;
  kernel::CmpOp cmp = kernel::CmpOp::Lt;
  ValueExpr bound;  // in model time units
};

using Guard = std::vector<Atom>;  // conjunction; empty means true

struct Action {
  enum class Kind : std::uint8_t { Call, ResetClock } kind = Kind::Call;
  int op = -1;
  std::vector<ValueExpr> args;
  int clock = -1;
};

struct Transition {
  int src = -1;  // kJunction for the initial junction
  int dst = -1;
  bool exec = false;
  Guard guard;
  std::vector<Action> actions;
  int line = 0;
};

inline constexpr int kJunction = -1;

struct State {
  std::string name;
  std::vector<Action> entry;
  int line = 0;
};

struct CyclicStateMachine {
  std::string name;
  std::uint32_t cycle = 1;  // model-cycle multiplier of the time unit
  std::vector<std::string> clocks;
  std::vector<State> states;
  std::vector<Transition> transitions;

  int state(std::string_view n) const;
  int clock(std::string_view n) const;
};

/// A `.csm` file: shared declarations and one or more machines.
struct SmModel {
  std::vector<Constant> constants;
  std::vector<InputDecl> inputs;
  std::vector<Operation> operations;
  std::vector<CyclicStateMachine> machines;

  int constant(std::string_view n) const;
  int input(std::string_view n) const;      // bare or Interface.name
  int operation(std::string_view n) const;  // bare or Interface.name
};

/// Throws ParseError (E_SYNTAX, E_DUPLICATE_NAME, E_UNKNOWN_NAME).
SmModel parse_csm(std::string_view text);

using ConstValues = std::map<std::string, std::int64_t>;

/// File defaults overridden by `overrides`, every value checked against
/// its range. Throws E_CONST_RANGE.
ConstValues resolve_constants(const SmModel& m, const ConstValues& overrides = {});

/// Throws E_CONST_RANGE on division by zero or an unknown constant.
std::int64_t evaluate(const ValueExpr& e, const ConstValues& values);

/// Kernel names: i_<Interface>_<name>, o_<Interface>_<op>[_<param>_<bit>].
std::string input_var(const InputDecl& in);
std::string invoke_var(const Operation& op);
std::string arg_var(const Operation& op, const Param& p, int bit);

/// Bits needed to carry every value of `r` (r.lo >= 0).
int bits_for(const Range& r);

}  // namespace vigil::sm
