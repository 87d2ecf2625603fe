#pragma once

#include <vector>

#include "vigil/relay/netlist.hpp"

namespace vigil::relay {

using RelayState = std::vector<bool>;  // index = relay
using InputState = std::vector<bool>;  // index = input

/// min(2 * 2^relays, 1024)
int default_max_iter(const Netlist& n);

/// One settling iteration: every relay whose coil sits on a closed path
/// from a live source (P+ or an ON input) to a sink (N- or an output)
/// becomes active, every other relay inactive.
RelayState next_relays(const Netlist& n, const InputState& inputs, const RelayState& active);

/// Outputs reached by a closed path from a live source.
std::vector<bool> output_states(const Netlist& n, const InputState& inputs, const RelayState& active);

struct SettleResult {
  bool fixed_point = false;  // false: oscillation within max_iter
  RelayState relays;         // the fixed point, or the last iterate
  std::vector<bool> outputs;
  int iterations = 0;
};

/// Iterates next_relays from `prev` until two consecutive states agree.
SettleResult settle(const Netlist& n, const InputState& inputs, const RelayState& prev, int max_iter);

}  // namespace vigil::relay
