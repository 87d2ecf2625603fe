#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/kernel/program.hpp"

namespace vigil::checker {

/// Propositional formula over registers. An atom compares one register with
/// ON, OFF or a number; a bare register name means `= ON`.
struct Formula {
  enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or, Implies } kind = Kind::True;
  std::string var;
  bool equal = true;  // `=` or `!=`
  std::uint32_t value = 0;
  int index = -1;  // register index once bound
  std::vector<Formula> args;
};

struct Property {
  std::string name;
  Formula formula;
  std::string text;  // as written
  int line = 0;
};

/// `.prop` files: `name: formula` per line, `#` comments.
/// Operators by increasing precedence: `=>`, `|`, `&`, `!`.
/// Throws ParseError (E_SYNTAX, E_DUPLICATE_NAME).
std::vector<Property> parse_properties(std::string_view text);
Formula parse_formula(std::string_view text);

std::string format_formula(const Formula& f);

/// Resolves every register the formula reads; locals are not registers.
/// Throws E_UNKNOWN_NAME.
void bind(Formula& f, const kernel::CyclicProgram& program);

bool holds(const Formula& f, const kernel::CyclicProgram& program, const kernel::VarStore& store);

}  // namespace vigil::checker
