#pragma once

#include <cstdint>
#include <vector>

#include "vigil/kernel/program.hpp"
#include "vigil/sm/model.hpp"
#include "vigil/sm/pinmap.hpp"

namespace vigil::sm {

struct Invocation {
  int op = -1;
  std::vector<std::int64_t> args;
};

/// Executes the source machine directly, one model cycle per step: exec
/// transitions of the waiting state, then timeless transitions until a
/// waiting state is reached. Knows nothing of normalization.
class SmInterpreter {
 public:
  SmInterpreter(const SmModel& model, int machine, ConstValues values);

  /// `inputs` is indexed like SmModel::inputs.
  std::vector<Invocation> step(const std::vector<bool>& inputs);

  int state() const { return state_; }  // -1 before the first cycle
  std::uint64_t time() const { return time_; }

 private:
  bool holds(const Guard& g, const std::vector<bool>& inputs) const;
  void perform(const std::vector<Action>& acts, std::vector<Invocation>& out);
  void take(const Transition& t, const std::vector<bool>& inputs, std::vector<Invocation>& out);

  const SmModel& model_;
  const CyclicStateMachine& sm_;
  ConstValues values_;
  int state_ = -1;
  std::uint64_t time_ = 0;
  std::vector<std::uint64_t> clocks_;
};

/// Output pin codes after a model cycle with these invocations.
kernel::OutputVector expected_outputs(const ResolvedPins& pins,
                                      const std::vector<Invocation>& calls, kernel::IoConfig io);

}  // namespace vigil::sm
