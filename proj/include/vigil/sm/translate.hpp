#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vigil/kernel/program.hpp"
#include "vigil/sm/model.hpp"
#include "vigil/sm/normalize.hpp"
#include "vigil/sm/pinmap.hpp"

namespace vigil::sm {

struct SmTranslation {
  std::string source;  // kernel program text
  kernel::CyclicProgram program;  // prepared
  std::vector<NormalizedMachine> machines;
  ResolvedPins pins;
  ConstValues constants;
};

/// Kernel state names of machine `m`.
std::string state_var(const CyclicStateMachine& m);  // normalized state
std::string time_var(const CyclicStateMachine& m);   // model time, in time units
std::string last_var(const CyclicStateMachine& m);   // board tick of the last model cycle

/// One model cycle of every machine runs on the first board cycle and then
/// whenever `cycle * cycle_unit_ms` has elapsed since its previous one.
/// Without `pins` the default pin map is used.
/// Throws E_CONST_RANGE, E_PIN_OVERFLOW, E_DOUBLE_INVOKE and the errors of normalize.
SmTranslation translate_sm(const SmModel& model, std::uint32_t cycle_unit_ms, const ConstValues& overrides = {},
                           const std::optional<PinMap>& pins = std::nullopt, kernel::IoConfig io = {});

}  // namespace vigil::sm
