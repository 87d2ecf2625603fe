#pragma once

#include <string>
#include <vector>

#include "vigil/sm/model.hpp"

namespace vigil::sm {

struct NormBranch;

/// Work done within one model cycle: run `actions`, then take the first
/// branch whose guard holds (guards see the effect of `actions`). Without
/// branches, or when no branch holds, the machine waits in `dst`.
struct NormNode {
  std::vector<Action> actions;
  std::vector<NormBranch> branches;
  int dst = -1;  // normalized state
};

struct NormBranch {
  Guard guard;
  NormNode next;
};

/// States are INIT followed by EXEC_1..EXEC_n; every state owns the code of
/// one model cycle.
struct NormalizedMachine {
  std::string name;
  std::uint32_t cycle = 1;
  std::vector<std::string> clocks;
  std::vector<std::string> states;
  std::vector<int> origin;  // waiting state of the source machine, -1 for INIT
  std::vector<std::string> waits_in;  // its name, empty for INIT
  std::vector<NormNode> cycles;
};

/// Throws E_TIMELESS_LOOP, E_NONTOTAL_TIMELESS, E_DOUBLE_INVOKE.
NormalizedMachine normalize(const SmModel& model, const CyclicStateMachine& sm);

/// A state is timeless when it has a transition without exec.
bool is_timeless(const CyclicStateMachine& sm, int state);

std::string format_normalized(const SmModel& model, const NormalizedMachine& nm);

}  // namespace vigil::sm
