#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/codegen/image.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::vm {

enum class PanicReason : std::uint8_t {
  InputDivergence,
  DataMismatch,
  ProgramMismatch,
  HandshakeTimeout,
  OutputFeedback,
  VitalCode,
};

std::string_view reason_name(PanicReason r);

enum class Binary : std::uint8_t { A, B };

enum class FaultKind : std::uint8_t {
  RamDataFlip,
  RamCodeFlip,
  StuckOutput,
  HandshakeDrop,
  InputDivergence,
  UploadCorruption,
};

std::string_view fault_name(FaultKind k);

struct Fault {
  FaultKind kind = FaultKind::RamDataFlip;
  std::uint64_t at_cycle = 0;
  int uc = 0;  // 0 or 1
  Binary binary = Binary::A;
  std::uint32_t offset = 0;
  int bit = 0;
  int pin = 0;
  bool on = false;  // stuck value
  codegen::SegmentKind segment = codegen::SegmentKind::CodeA;
};

struct BoardConfig {
  std::uint32_t cycle_ms = 5;
  int settle_delay = 2;
  std::uint32_t sweep_chunk = 64;
  std::uint32_t handshake_deadline_ms = 50;
};

/// Cycles between two handshakes: max(1, ceil(deadline / period) - 1).
std::uint32_t handshake_interval(const BoardConfig& cfg);

struct PanicRecord {
  int uc = 0;
  PanicReason reason = PanicReason::DataMismatch;
  std::string detail;
};

struct CycleReport {
  std::uint64_t cycle = 0;
  std::uint32_t ms = 0;
  std::array<kernel::InputVector, 2> inputs;  // as sampled by each channel
  kernel::OutputVector out_mem;               // channel 1, binary A output registers
  std::vector<bool> out_phy;                  // physical state read back this cycle
  std::vector<std::string> events;
  std::vector<PanicRecord> panics;            // new this cycle
};

/// Flips one bit of a segment payload without touching stored checksums.
void corrupt(codegen::ProgramImage& image, codegen::SegmentKind seg, std::uint32_t offset, int bit);

/// The dual-channel board. Construction is the bootload: checksums and
/// the memory map are verified, RAM is filled from flash and the INIT
/// routines run on both channels.
class Board {
 public:
  explicit Board(codegen::ProgramImage image, BoardConfig cfg = {});

  /// Hard reset: back to the freshly bootloaded state.
  void reset();

  /// Queues a fault; it activates at its cycle. Throws E_FAULT_TARGET.
  void schedule(const Fault& f);

  /// One board cycle with the given physical input lines (index = pin-1).
  /// After a panic this is a no-op that keeps every output OFF.
  CycleReport step(const kernel::InputVector& lines);

  bool panicked() const { return panicked_; }
  const std::vector<PanicRecord>& panic_records() const { return panic_log_; }
  std::optional<std::uint64_t> panic_cycle() const { return panic_cycle_; }
  std::uint64_t cycle() const { return cycle_; }
  std::uint32_t ms_clock() const { return clock_; }
  const BoardConfig& config() const { return cfg_; }
  const codegen::ProgramImage& image() const { return flash_; }

  /// Physical output state (index = pin-1).
  std::vector<bool> physical_outputs() const;

  /// Logical value of a variable in one binary instance.
  std::uint32_t value(int uc, Binary b, std::string_view name) const;
  /// All variables of one instance in symbol-table order.
  std::vector<std::pair<std::string, std::uint32_t>> variables(int uc, Binary b) const;

  const std::vector<std::uint8_t>& data(int uc, Binary b) const;
  const std::vector<std::uint8_t>& code(int uc, Binary b) const;
  std::uint32_t sweep_length() const;  // cycles per full code sweep

 private:
  struct Channel {
    std::array<std::vector<std::uint8_t>, 2> code;
    std::array<std::vector<std::uint8_t>, 2> data;
    std::vector<std::uint8_t> spill;
    kernel::InputVector sampled;
    std::deque<std::vector<bool>> out_history;  // own output registers, newest last
    std::uint32_t sweep_cursor = 0;
    bool failed = false;
  };

  void bootload();
  void activate(const Fault& f, bool before_execution);
  std::uint32_t store_crc(const Channel& ch, Binary b) const;
  std::vector<bool> own_outputs(const Channel& ch) const;
  void fail(int uc, PanicReason r, std::string detail, CycleReport& rep);
  void enter_panic(CycleReport& rep);

  codegen::ProgramImage flash_;
  BoardConfig cfg_;
  std::array<Channel, 2> ch_;
  std::vector<Fault> pending_;
  std::map<int, bool> stuck_;                     // pin -> value
  std::array<bool, 2> handshake_drop_{};
  std::vector<std::pair<int, int>> divergence_;   // this cycle: (uc, pin)
  std::deque<std::vector<bool>> driven_;          // values driven onto the lines, newest last
  std::vector<bool> phy_;
  std::uint64_t cycle_ = 0;
  std::uint32_t clock_ = 0;
  std::uint32_t last_handshake_ = 0;
  bool panicked_ = false;
  std::optional<std::uint64_t> panic_cycle_;
  std::vector<PanicRecord> panic_log_;
};

}  // namespace vigil::vm
