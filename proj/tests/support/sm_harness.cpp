#include "sm_harness.hpp"

#include "vigil/kernel/interpreter.hpp"
#include "vigil/sm/interpreter.hpp"

namespace vigil::testing {

SmRun run_sm_equivalence(const sm::SmModel& model, const sm::SmTranslation& tr, std::uint32_t board_ms,
                         const std::vector<std::vector<bool>>& inputs) {
  SmRun run;
  const auto& p = tr.program;
  const auto& m = model.machines.at(0);
  auto time_slot = static_cast<std::size_t>(p.find(sm::time_var(m)));
  sm::SmInterpreter ref(model, 0, tr.constants);
  auto store = kernel::initial_store(p);
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    kernel::InputVector pins(static_cast<std::size_t>(p.io.inputs), kernel::kIoOff);
    for (std::size_t i = 0; i < inputs[c].size(); ++i) {
      pins[static_cast<std::size_t>(tr.pins.input[i] - 1)] = inputs[c][i] ? kernel::kIoOn : kernel::kIoOff;
    }
    std::uint64_t ms = c * board_ms;
    std::uint32_t before = store[time_slot];
    auto out = kernel::interpret_cycle(p, store, pins, ms);
    store = std::move(out.store);
    if (store[time_slot] == before) continue;
    ++run.model_cycles;
    run.fire_ms.push_back(ms);
    auto expected = sm::expected_outputs(tr.pins, ref.step(inputs[c]), p.io);
    if (expected != out.outputs) {
      if (run.mismatches++ == 0) {
        run.first_mismatch = "model cycle " + std::to_string(run.model_cycles - 1) + " at " + std::to_string(ms) + " ms";
      }
    }
  }
  return run;
}

}  // namespace vigil::testing
