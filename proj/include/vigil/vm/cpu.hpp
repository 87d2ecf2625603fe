#pragma once

#include <cstdint>
#include <span>

namespace vigil::vm {

// Both executors decode straight from RAM so corrupted code behaves as it
// would on the board. Any illegal state throws Error("E_TRAP", ...).

/// Runs the stack routine occupying code[begin, end). Empty ranges are no-ops.
void run_a(std::span<const std::uint8_t> code, std::uint32_t begin, std::uint32_t end,
           std::span<std::uint8_t> data, std::uint32_t clock);

/// Runs the register routine occupying code[begin, end); `spill` is the
/// per-channel scratch area (4 bytes per slot).
void run_b(std::span<const std::uint8_t> code, std::uint32_t begin, std::uint32_t end,
           std::span<std::uint8_t> data, std::span<std::uint8_t> spill, std::uint32_t clock);

}  // namespace vigil::vm
