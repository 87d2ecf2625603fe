#include "vigil/vm/board.hpp"

#include <algorithm>

#include "vigil/codegen/crc32.hpp"
#include "vigil/common/error.hpp"
#include "vigil/vm/cpu.hpp"

namespace vigil::vm {

using codegen::SegmentKind;
using kernel::kIoOff;
using kernel::kIoOn;
using kernel::VarKind;

std::string_view reason_name(PanicReason r) {
  switch (r) {
    case PanicReason::InputDivergence: return "INPUT_DIVERGENCE";
    case PanicReason::DataMismatch: return "DATA_MISMATCH";
    case PanicReason::ProgramMismatch: return "PROGRAM_MISMATCH";
    case PanicReason::HandshakeTimeout: return "HANDSHAKE_TIMEOUT";
    case PanicReason::OutputFeedback: return "OUTPUT_FEEDBACK";
    case PanicReason::VitalCode: return "VITAL_CODE";
  }
  return "?";
}

std::string_view fault_name(FaultKind k) {
  switch (k) {
    case FaultKind::RamDataFlip: return "ram_data_flip";
    case FaultKind::RamCodeFlip: return "ram_code_flip";
    case FaultKind::StuckOutput: return "stuck_output";
    case FaultKind::HandshakeDrop: return "handshake_drop";
    case FaultKind::InputDivergence: return "input_divergence";
    case FaultKind::UploadCorruption: return "upload_corruption";
  }
  return "?";
}

std::uint32_t handshake_interval(const BoardConfig& cfg) {
  std::uint32_t n = (cfg.handshake_deadline_ms + cfg.cycle_ms - 1) / cfg.cycle_ms;
  return std::max<std::uint32_t>(1, n - 1);
}

void corrupt(codegen::ProgramImage& image, SegmentKind seg, std::uint32_t offset, int bit) {
  auto& bytes = image.segment(seg).bytes;
  if (offset >= bytes.size() || bit < 0 || bit > 7) {
    throw Error("E_FAULT_TARGET", "corruption target outside " + std::string(codegen::segment_name(seg)));
  }
  bytes[offset] ^= static_cast<std::uint8_t>(1u << bit);
}

namespace {

SegmentKind code_seg(Binary b) { return b == Binary::A ? SegmentKind::CodeA : SegmentKind::CodeB; }
SegmentKind data_seg(Binary b) { return b == Binary::A ? SegmentKind::DataA : SegmentKind::DataB; }
std::size_t idx(Binary b) { return static_cast<std::size_t>(b); }

}  // namespace

Board::Board(codegen::ProgramImage image, BoardConfig cfg) : flash_(std::move(image)), cfg_(cfg) {
  if (cfg_.cycle_ms == 0 || cfg_.cycle_ms >= cfg_.handshake_deadline_ms) {
    throw Error("E_CONFIG", "cycle period must be between 1 and " + std::to_string(cfg_.handshake_deadline_ms - 1) +
                                " ms");
  }
  if (cfg_.sweep_chunk == 0) throw Error("E_CONFIG", "sweep chunk must be positive");
  if (cfg_.settle_delay < 1) throw Error("E_CONFIG", "settle delay must be at least one cycle");
  codegen::check_crcs(flash_);
  codegen::check_disjoint(flash_);
  bootload();
}

void Board::reset() {
  pending_.clear();
  stuck_.clear();
  bootload();
}

void Board::bootload() {
  cycle_ = 0;
  clock_ = 0;
  last_handshake_ = 0;
  panicked_ = false;
  panic_cycle_.reset();
  panic_log_.clear();
  handshake_drop_ = {false, false};
  divergence_.clear();
  driven_.clear();
  phy_.assign(static_cast<std::size_t>(flash_.io.outputs), false);
  for (auto& ch : ch_) {
    for (Binary b : {Binary::A, Binary::B}) {
      ch.code[idx(b)] = flash_.segment(code_seg(b)).bytes;
      ch.data[idx(b)] = flash_.segment(data_seg(b)).bytes;
    }
    ch.spill.assign(std::size_t{flash_.spill_b} * 4, 0);
    ch.sampled.assign(static_cast<std::size_t>(flash_.io.inputs), kIoOff);
    ch.out_history.clear();
    ch.sweep_cursor = 0;
    ch.failed = false;
  }
  CycleReport boot;
  for (int uc = 0; uc < 2; ++uc) {
    auto& ch = ch_[static_cast<std::size_t>(uc)];
    try {
      run_a(ch.code[0], 0, flash_.entry_a, ch.data[0], 0);
      run_b(ch.code[1], 0, flash_.entry_b, ch.data[1], ch.spill, 0);
    } catch (const Error& e) {
      if (e.code() != "E_TRAP") throw;
      fail(uc, PanicReason::ProgramMismatch, std::string("init: ") + e.what(), boot);
    }
  }
  if (!boot.panics.empty()) enter_panic(boot);
}

void Board::schedule(const Fault& f) {
  auto bad = [&](const std::string& why) { throw Error("E_FAULT_TARGET", std::string(fault_name(f.kind)) + ": " + why); };
  if (f.uc < 0 || f.uc > 1) bad("channel must be 1 or 2");
  switch (f.kind) {
    case FaultKind::RamDataFlip:
    case FaultKind::RamCodeFlip: {
      auto seg = f.kind == FaultKind::RamDataFlip ? data_seg(f.binary) : code_seg(f.binary);
      if (f.offset >= flash_.segment(seg).bytes.size()) bad("offset outside " + std::string(codegen::segment_name(seg)));
      if (f.bit < 0 || f.bit > 7) bad("bit must be 0..7");
      break;
    }
    case FaultKind::StuckOutput:
      if (f.pin < 1 || f.pin > flash_.io.outputs) bad("no such output pin");
      break;
    case FaultKind::InputDivergence:
      if (f.pin < 1 || f.pin > flash_.io.inputs) bad("no such input pin");
      break;
    case FaultKind::HandshakeDrop:
      break;
    case FaultKind::UploadCorruption:
      bad("applies to the image before bootload");
  }
  pending_.push_back(f);
}

void Board::activate(const Fault& f, bool before_execution) {
  auto& ch = ch_[static_cast<std::size_t>(f.uc)];
  bool data_flip = f.kind == FaultKind::RamDataFlip;
  if (data_flip == before_execution) return;
  switch (f.kind) {
    case FaultKind::RamDataFlip:
      ch.data[idx(f.binary)][f.offset] ^= static_cast<std::uint8_t>(1u << f.bit);
      break;
    case FaultKind::RamCodeFlip:
      ch.code[idx(f.binary)][f.offset] ^= static_cast<std::uint8_t>(1u << f.bit);
      break;
    case FaultKind::StuckOutput:
      stuck_[f.pin] = f.on;
      break;
    case FaultKind::HandshakeDrop:
      handshake_drop_[static_cast<std::size_t>(f.uc)] = true;
      break;
    case FaultKind::InputDivergence:
      divergence_.emplace_back(f.uc, f.pin);
      break;
    case FaultKind::UploadCorruption:
      break;
  }
}

std::uint32_t Board::store_crc(const Channel& ch, Binary b) const {
  std::uint32_t state = codegen::kCrcInit;
  const auto& data = ch.data[idx(b)];
  for (const auto& sym : flash_.symbols) {
    std::uint32_t off = b == Binary::A ? sym.offset_a : sym.offset_b;
    std::uint32_t n = kernel::bytes_of(sym.width);
    std::uint8_t buf[4] = {0, 0, 0, 0};
    if (off + n <= data.size()) std::copy_n(data.begin() + off, n, buf);
    state = codegen::crc32_update(state, std::span<const std::uint8_t>(buf, n));
  }
  return codegen::crc32_finish(state);
}

std::vector<bool> Board::own_outputs(const Channel& ch) const {
  std::vector<bool> out(static_cast<std::size_t>(flash_.io.outputs), false);
  for (const auto& sym : flash_.symbols) {
    if (sym.kind != VarKind::Output || sym.pin < 1 || sym.pin > out.size()) continue;
    out[sym.pin - 1u] = ch.data[0][sym.offset_a] == kIoOn;
  }
  return out;
}

void Board::fail(int uc, PanicReason r, std::string detail, CycleReport& rep) {
  auto& ch = ch_[static_cast<std::size_t>(uc)];
  if (ch.failed) return;
  ch.failed = true;
  rep.panics.push_back({uc, r, std::move(detail)});
}

void Board::enter_panic(CycleReport& rep) {
  panicked_ = true;
  panic_cycle_ = cycle_;
  std::fill(phy_.begin(), phy_.end(), false);
  for (const auto& p : rep.panics) panic_log_.push_back(p);
}

std::vector<bool> Board::physical_outputs() const { return phy_; }

std::uint32_t Board::sweep_length() const {
  std::uint32_t total = 0;
  for (Binary b : {Binary::A, Binary::B}) total += static_cast<std::uint32_t>(flash_.segment(code_seg(b)).bytes.size());
  return (total + cfg_.sweep_chunk - 1) / cfg_.sweep_chunk;
}

CycleReport Board::step(const kernel::InputVector& lines) {
  CycleReport rep;
  rep.cycle = cycle_;
  rep.ms = clock_;
  if (panicked_) {
    std::fill(phy_.begin(), phy_.end(), false);
    rep.out_phy = phy_;
    rep.out_mem.assign(static_cast<std::size_t>(flash_.io.outputs), kIoOff);
    rep.events.push_back("PANIC");
    return rep;
  }

  divergence_.clear();
  std::vector<Fault> later;
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->at_cycle == cycle_) {
      activate(*it, true);
      if (it->kind == FaultKind::RamDataFlip) later.push_back(*it);
      rep.events.push_back("FAULT:" + std::string(fault_name(it->kind)));
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }

  // sample
  for (int uc = 0; uc < 2; ++uc) {
    auto& ch = ch_[static_cast<std::size_t>(uc)];
    for (std::size_t i = 0; i < ch.sampled.size(); ++i) ch.sampled[i] = i < lines.size() ? lines[i] : kIoOff;
    for (auto [duc, pin] : divergence_) {
      if (duc != uc) continue;
      auto& v = ch.sampled[static_cast<std::size_t>(pin - 1)];
      v = v == kIoOn ? kIoOff : kIoOn;
    }
    for (const auto& sym : flash_.symbols) {
      if (sym.kind != VarKind::Input || sym.pin < 1 || sym.pin > ch.sampled.size()) continue;
      std::uint8_t v = ch.sampled[sym.pin - 1u];
      if (sym.offset_a < ch.data[0].size()) ch.data[0][sym.offset_a] = v;
      if (sym.offset_b < ch.data[1].size()) ch.data[1][sym.offset_b] = v;
    }
    rep.inputs[static_cast<std::size_t>(uc)] = ch.sampled;
  }

  // execute
  for (int uc = 0; uc < 2; ++uc) {
    auto& ch = ch_[static_cast<std::size_t>(uc)];
    try {
      run_a(ch.code[0], flash_.entry_a, static_cast<std::uint32_t>(ch.code[0].size()), ch.data[0], clock_);
      run_b(ch.code[1], flash_.entry_b, static_cast<std::uint32_t>(ch.code[1].size()), ch.data[1], ch.spill, clock_);
    } catch (const Error& e) {
      if (e.code() != "E_TRAP") throw;
      fail(uc, PanicReason::ProgramMismatch, e.what(), rep);
    }
  }
  for (const auto& f : later) activate(f, false);

  // (1) input agreement
  if (ch_[0].sampled != ch_[1].sampled) {
    for (int uc = 0; uc < 2; ++uc) fail(uc, PanicReason::InputDivergence, "channels sampled different inputs", rep);
  }
  // (2) binary A against binary B inside each channel
  std::array<std::uint32_t, 2> crc{};
  for (int uc = 0; uc < 2; ++uc) {
    auto& ch = ch_[static_cast<std::size_t>(uc)];
    crc[static_cast<std::size_t>(uc)] = store_crc(ch, Binary::A);
    if (ch.failed) continue;
    if (crc[static_cast<std::size_t>(uc)] != store_crc(ch, Binary::B)) {
      fail(uc, PanicReason::DataMismatch, "data of binary A and binary B differ", rep);
    }
  }
  // (3) background program sweep
  {
    const std::uint32_t size_a = static_cast<std::uint32_t>(ch_[0].code[0].size());
    const std::uint32_t total = size_a + static_cast<std::uint32_t>(ch_[0].code[1].size());
    if (total > 0) {
      auto byte_at = [&](const Channel& ch, std::uint32_t i) { return i < size_a ? ch.code[0][i] : ch.code[1][i - size_a]; };
      std::uint32_t from = ch_[0].sweep_cursor;
      std::uint32_t to = std::min(total, from + cfg_.sweep_chunk);
      for (std::uint32_t i = from; i < to; ++i) {
        if (byte_at(ch_[0], i) != byte_at(ch_[1], i)) {
          for (int uc = 0; uc < 2; ++uc) {
            fail(uc, PanicReason::ProgramMismatch, "program memory differs at code byte " + std::to_string(i), rep);
          }
          break;
        }
      }
      bool wrap = to >= total;
      for (auto& ch : ch_) ch.sweep_cursor = wrap ? 0 : to;
      if (wrap) {
        for (int uc = 0; uc < 2; ++uc) {
          const auto& ch = ch_[static_cast<std::size_t>(uc)];
          if (codegen::crc32(ch.code[0]) != flash_.segment(SegmentKind::CodeA).crc ||
              codegen::crc32(ch.code[1]) != flash_.segment(SegmentKind::CodeB).crc) {
            fail(uc, PanicReason::ProgramMismatch, "program memory differs from flash", rep);
          }
        }
      }
    }
  }
  // (4) cross-channel handshake
  if (cycle_ % handshake_interval(cfg_) == 0) {
    if (handshake_drop_[0] || handshake_drop_[1]) {
      rep.events.push_back("HS_LOST");
    } else if (crc[0] != crc[1]) {
      for (int uc = 0; uc < 2; ++uc) fail(uc, PanicReason::DataMismatch, "channel data checksums differ", rep);
    } else {
      last_handshake_ = clock_;
      rep.events.push_back("HS");
    }
  }
  if (clock_ - last_handshake_ >= cfg_.handshake_deadline_ms) {
    for (int uc = 0; uc < 2; ++uc) {
      fail(uc, PanicReason::HandshakeTimeout,
           "no handshake since " + std::to_string(last_handshake_) + " ms", rep);
    }
  }
  // (5) output feedback
  const auto d = static_cast<std::size_t>(cfg_.settle_delay);
  std::vector<bool> readback(phy_.size(), false);
  if (driven_.size() >= d) readback = driven_[driven_.size() - d];
  for (auto [pin, v] : stuck_) readback[static_cast<std::size_t>(pin - 1)] = v;
  for (int uc = 0; uc < 2; ++uc) {
    auto& ch = ch_[static_cast<std::size_t>(uc)];
    auto now = own_outputs(ch);
    ch.out_history.push_back(now);
    while (ch.out_history.size() > d + 1) ch.out_history.pop_front();
    std::vector<bool> expected(phy_.size(), false);
    if (ch.out_history.size() == d + 1) expected = ch.out_history.front();
    if (ch.failed) continue;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (expected[i] != readback[i]) {
        fail(uc, PanicReason::OutputFeedback, "output pin " + std::to_string(i + 1) + " reads back " +
                                                  (readback[i] ? "ON" : "OFF"), rep);
        break;
      }
    }
  }
  // (6) vital codes
  for (int uc = 0; uc < 2; ++uc) {
    auto& ch = ch_[static_cast<std::size_t>(uc)];
    if (ch.failed) continue;
    for (const auto& sym : flash_.symbols) {
      if (sym.kind != VarKind::Output) continue;
      std::uint8_t va = ch.data[0][sym.offset_a];
      std::uint8_t vb = ch.data[1][sym.offset_b];
      if (!kernel::is_io_code(va) || !kernel::is_io_code(vb)) {
        fail(uc, PanicReason::VitalCode, "E_VITAL_IO_CODE: " + sym.name + " holds an invalid code", rep);
        break;
      }
    }
  }

  rep.out_mem.assign(static_cast<std::size_t>(flash_.io.outputs), kIoOff);
  for (const auto& sym : flash_.symbols) {
    if (sym.kind == VarKind::Output && sym.pin >= 1 && sym.pin <= rep.out_mem.size()) {
      rep.out_mem[sym.pin - 1u] = ch_[0].data[0][sym.offset_a];
    }
  }

  if (!rep.panics.empty()) {
    enter_panic(rep);
    rep.out_phy = phy_;
    rep.events.push_back("PANIC");
    return rep;
  }

  phy_ = readback;
  rep.out_phy = phy_;
  // drive: command from channel 1, energy from channel 2
  auto command = own_outputs(ch_[0]);
  auto energy = own_outputs(ch_[1]);
  std::vector<bool> drive(command.size());
  for (std::size_t i = 0; i < drive.size(); ++i) drive[i] = command[i] && energy[i];
  driven_.push_back(drive);
  while (driven_.size() > d + 1) driven_.pop_front();
  ++cycle_;
  clock_ += cfg_.cycle_ms;
  return rep;
}

std::uint32_t Board::value(int uc, Binary b, std::string_view name) const {
  const auto* sym = flash_.find(name);
  if (!sym) throw Error("E_UNKNOWN_VAR", "no variable '" + std::string(name) + "'");
  const auto& data = ch_[static_cast<std::size_t>(uc)].data[idx(b)];
  std::uint32_t off = b == Binary::A ? sym->offset_a : sym->offset_b;
  return codegen::load_le(data.data() + off, kernel::bytes_of(sym->width));
}

std::vector<std::pair<std::string, std::uint32_t>> Board::variables(int uc, Binary b) const {
  std::vector<std::pair<std::string, std::uint32_t>> out;
  for (const auto& sym : flash_.symbols) out.emplace_back(sym.name, value(uc, b, sym.name));
  return out;
}

const std::vector<std::uint8_t>& Board::data(int uc, Binary b) const {
  return ch_[static_cast<std::size_t>(uc)].data[idx(b)];
}

const std::vector<std::uint8_t>& Board::code(int uc, Binary b) const {
  return ch_[static_cast<std::size_t>(uc)].code[idx(b)];
}

}  // namespace vigil::vm
