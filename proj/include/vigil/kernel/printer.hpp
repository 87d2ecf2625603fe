#pragma once

#include <string>

#include "vigil/kernel/program.hpp"

namespace vigil::kernel {

/// Renders a program back to `.ckp` text; parse_program(print_program(p))
/// reproduces p up to source locations.
std::string print_program(const CyclicProgram& program);

std::string print_expr(const Expr& e);

}  // namespace vigil::kernel
