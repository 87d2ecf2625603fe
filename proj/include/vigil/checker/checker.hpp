#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vigil/checker/property.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::checker {

inline constexpr std::uint64_t kDefaultMaxStates = 10'000'000;

struct CheckOptions {
  int depth = 32;  // board cycles
  std::uint64_t max_states = kDefaultMaxStates;
  int jobs = 1;
};

struct CheckResult {
  bool verified = false;
  int depth = 0;                    // bound explored, or counterexample length
  bool exhaustive = false;          // every reachable state was expanded
  std::uint64_t states_explored = 0;  // (state, input vector) pairs
  std::uint64_t distinct_states = 0;
  std::vector<kernel::InputVector> trace;  // counterexample inputs, one per cycle, by pin
  kernel::VarStore violating;              // store after the last cycle of `trace`
  bool vital_fault = false;                // the violating cycle panics the board
};

/// Breadth-first exploration of every input sequence up to `depth` cycles,
/// from the initial store. The property is checked after each cycle; in a
/// cycle that writes an invalid output code the board is in panic, so
/// outputs read as OFF and the state has no successors. Counterexamples
/// are minimal in length and, among those, first in input order (input 1
/// is the least significant digit), whatever `jobs` is.
///
/// Throws E_UNBOUNDED_VAR for programs that read the board clock and
/// E_STATE_EXPLOSION once more than `max_states` pairs would be explored.
CheckResult model_check(const kernel::CyclicProgram& program, const Property& property, const CheckOptions& opt = {});

/// Scenario that drives the counterexample on a board (inputs start OFF).
std::string counterexample_scenario(const kernel::CyclicProgram& program, const Property& property,
                                    const CheckResult& r);

}  // namespace vigil::checker
