#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vigil/kernel/program.hpp"
#include "vigil/relay/netlist.hpp"

namespace vigil::relay {

inline constexpr std::size_t kMaxPaths = 10000;

/// A source-to-sink route through strands joined at junctions.
struct Path {
  std::vector<int> strands;
  int input = -1;   // source input, or -1 for P+
  int output = -1;  // sink output, or -1 for N-
  std::uint32_t no_mask = 0;    // relays that must be active
  std::uint32_t nc_mask = 0;    // relays that must be inactive
  std::uint32_t coil_mask = 0;  // relays energised when the path conducts
};

/// Every simple path. Throws E_PATH_EXPLOSION beyond kMaxPaths.
std::vector<Path> elaborate(const Netlist& n);

struct RelayTranslation {
  std::string source;  // kernel program text
  kernel::CyclicProgram program;  // prepared
  int max_iter = 0;
  /// First input vector (from all relays inactive) that does not settle, if any.
  std::optional<std::vector<bool>> oscillating_inputs;
};

/// Variables: inputs i_<X>, outputs o_<Y>, relay state r_<R> (all io).
/// max_iter <= 0 selects default_max_iter. Throws E_TOO_MANY_IO.
RelayTranslation translate_relay(const Netlist& n, int max_iter = 0, kernel::IoConfig io = {});

}  // namespace vigil::relay
