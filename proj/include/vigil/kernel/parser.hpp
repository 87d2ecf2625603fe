#pragma once

#include <string_view>

#include "vigil/kernel/program.hpp"

namespace vigil::kernel {

/// Parses `.ckp` kernel source. Sections (CONSTANTS, INPUTS, OUTPUTS, STATE,
/// INIT, LOGIC) start in column 0; statements nest by indentation.
///
/// The parser is deliberately permissive about typing: plain `+`, `and`/`or`
/// conditions and unknown type names all produce a tree so that validate()
/// can report them against the matching verification rule. Only malformed
/// text raises ParseError (code E_SYNTAX).
CyclicProgram parse_program(std::string_view source, IoConfig io = {});

/// Parses a single expression; used by tests and the property language.
Expr parse_expression(std::string_view source);

}  // namespace vigil::kernel
