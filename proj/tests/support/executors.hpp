#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vigil/codegen/bytecode_a.hpp"
#include "vigil/codegen/bytecode_b.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::testing {

/// Runs one compiled binary on a private data buffer, the way one channel
/// of the board would, without any safety checks.
class BinaryRunner {
 public:
  explicit BinaryRunner(codegen::BytecodeA a);
  explicit BinaryRunner(codegen::BytecodeB b);

  void cycle(const kernel::InputVector& pins, std::uint32_t clock);
  std::uint32_t value(const std::string& name) const;

 private:
  void init();

  bool is_a_ = true;
  codegen::BytecodeA a_;
  codegen::BytecodeB b_;
  std::vector<std::uint8_t> code_;
  std::uint32_t entry_ = 0;
  codegen::DataLayout layout_;
  std::vector<std::uint8_t> data_;
  std::vector<std::uint8_t> spill_;
};

}  // namespace vigil::testing
