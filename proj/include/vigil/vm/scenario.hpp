#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vigil/codegen/image.hpp"
#include "vigil/vm/board.hpp"

namespace vigil::vm {

struct InputEvent {
  std::uint64_t cycle = 0;
  int pin = 0;
  bool on = false;
};

/// `at <cycle> input <pin> ON|OFF`, `at <cycle> fault <kind> <args>`,
/// `run <cycles>`. Fault arguments (channels are 1 and 2):
///   ram_data_flip <uc> A|B <offset> <bit>     ram_code_flip <uc> A|B <offset> <bit>
///   stuck_output <pin> ON|OFF                 handshake_drop <uc>
///   input_divergence <uc> <pin>               upload_corruption <segment> <offset> <bit>
struct Scenario {
  std::vector<InputEvent> inputs;  // a level holds until changed
  std::vector<Fault> faults;
  std::uint64_t cycles = 0;  // sum of `run` records
};

/// Throws Error E_SCENARIO_PARSE.
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario& s);

struct Trace {
  std::vector<CycleReport> cycles;
  std::vector<std::vector<std::pair<std::string, std::uint32_t>>> variables;  // channel 1, binary A
  bool panicked = false;
  std::uint64_t end_cycle = 0;  // panic cycle, or number of cycles run
  std::vector<PanicRecord> panics;
  int input_count = 0;
  int output_count = 0;
};

/// Applies upload corruption, bootloads and runs. Bootload failures
/// (E_UPLOAD_CRC, E_MEM_OVERLAP) propagate as Error.
Trace run_scenario(codegen::ProgramImage image, const Scenario& scenario, const BoardConfig& cfg = {});

std::string format_trace_text(const Trace& t);
std::string format_trace_json(const Trace& t);

}  // namespace vigil::vm
