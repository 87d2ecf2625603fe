#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vigil/kernel/program.hpp"

namespace vigil::kernel {

/// (lhs op rhs) mod 2^width. Total for operands below 2^width.
std::uint32_t eval_mod(ArithOp op, Width width, std::uint32_t lhs, std::uint32_t rhs);

struct CycleOutcome {
  VarStore store;
  OutputVector outputs;
  /// Names of outputs holding a code outside {IO_OFF, IO_ON} (E_VITAL_IO_CODE).
  std::vector<std::string> vital_faults;
  std::size_t steps = 0;

  bool vital_fault() const { return !vital_faults.empty(); }
};

/// Data initialisation followed by the INIT block, executed at clock 0.
/// Constants hold their value; io registers start at IO_OFF unless given.
VarStore initial_store(const CyclicProgram& program);

/// Reference semantics of one board cycle. `program` must be prepared.
/// Inputs are copied into input registers from their pins, the logic body
/// runs once, and the output registers are read back by pin.
CycleOutcome interpret_cycle(const CyclicProgram& program, const VarStore& state, const InputVector& inputs,
                             std::uint64_t ms_clock);

/// Upper bound on evaluation steps of one pass over `body`; loops are absent
/// so this is a sum over statements with the larger branch of each IF.
std::size_t static_step_bound(const std::vector<Stmt>& body);

}  // namespace vigil::kernel
