#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/kernel/program.hpp"
#include "vigil/sm/model.hpp"

namespace vigil::sm {

struct ArgPins {
  std::string param;
  int first = 0;  // carries bit 0
  int last = 0;
};

struct OutputPins {
  std::string op;
  int invoke = 0;
  std::vector<ArgPins> args;
};

/// Lines `in obstacle pin 1` and `out move invoke pin 1 args lv:2-4 av:5-7`.
struct PinMap {
  std::vector<std::pair<std::string, int>> inputs;
  std::vector<OutputPins> outputs;
};

/// Throws ParseError (E_SYNTAX).
PinMap parse_pinmap(std::string_view text);
std::string format_pinmap(const PinMap& pm);

/// Inputs from pin 1 in declaration order; each operation takes its invoke
/// pin followed by the pins of its arguments.
PinMap default_pinmap(const SmModel& model);

/// Pins per model entity, bits least significant first.
struct ResolvedPins {
  std::vector<int> input;
  std::vector<int> invoke;
  std::vector<std::vector<std::vector<int>>> arg;  // [op][param][bit]
};

/// Throws E_PIN_OVERFLOW for pins outside `io`, pins used twice, argument
/// ranges wider than their pins and entities without a pin.
ResolvedPins resolve_pins(const SmModel& model, const PinMap& pm, kernel::IoConfig io);

/// Binary expansion b2 b1 b0 of a value in 0..7. Throws E_CONST_RANGE.
std::array<bool, 3> encode_arg(std::int64_t value);

/// Bits of `value`, least significant first. Throws E_CONST_RANGE when the
/// value is negative or needs more than `bits` bits.
std::vector<bool> encode_bits(std::int64_t value, int bits);

}  // namespace vigil::sm
