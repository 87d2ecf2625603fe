#include "vigil/vm/scenario.hpp"

#include <algorithm>
#include <map>
#include "json.hpp"

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::vm {

using kernel::kIoOff;
using kernel::kIoOn;

namespace {

[[noreturn]] void bad(int line, const std::string& msg) {
  throw Error("E_SCENARIO_PARSE", "line " + std::to_string(line) + ": " + msg);
}

std::uint64_t number(const std::vector<std::string>& w, std::size_t i, int line, const char* what) {
  if (i >= w.size()) bad(line, std::string("missing ") + what);
  auto v = text::parse_uint(w[i]);
  if (!v) bad(line, std::string("bad ") + what + " '" + w[i] + "'");
  return *v;
}

bool level(const std::vector<std::string>& w, std::size_t i, int line) {
  if (i >= w.size()) bad(line, "missing ON|OFF");
  if (w[i] == "ON") return true;
  if (w[i] == "OFF") return false;
  bad(line, "expected ON or OFF, got '" + w[i] + "'");
}

int channel(const std::vector<std::string>& w, std::size_t i, int line) {
  auto v = number(w, i, line, "channel");
  if (v != 1 && v != 2) bad(line, "channel must be 1 or 2");
  return static_cast<int>(v) - 1;
}

Binary binary(const std::vector<std::string>& w, std::size_t i, int line) {
  if (i >= w.size()) bad(line, "missing binary A|B");
  if (w[i] == "A") return Binary::A;
  if (w[i] == "B") return Binary::B;
  bad(line, "binary must be A or B");
}

std::string mask_hex(const std::vector<bool>& on, int count) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < on.size() && i < 64; ++i) {
    if (on[i]) m |= std::uint64_t{1} << i;
  }
  return text::hex(m, std::max(1, (count + 3) / 4));
}

std::vector<bool> is_on(const std::vector<std::uint8_t>& codes) {
  std::vector<bool> out(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) out[i] = codes[i] == kIoOn;
  return out;
}

std::string event_list(const CycleReport& r) {
  std::vector<std::string> ev = r.events;
  for (const auto& p : r.panics) ev.push_back("uc" + std::to_string(p.uc + 1) + ":" + std::string(reason_name(p.reason)));
  if (ev.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < ev.size(); ++i) s += (i ? "," : "") + ev[i];
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view src) {
  Scenario s;
  int n = 0;
  for (const auto& raw : text::lines(src)) {
    ++n;
    auto w = text::words(raw.substr(0, raw.find('#')));
    if (w.empty()) continue;
    if (w[0] == "run") {
      if (w.size() != 2) bad(n, "expected 'run <cycles>'");
      s.cycles += number(w, 1, n, "cycle count");
      continue;
    }
    if (w[0] != "at") bad(n, "expected 'at' or 'run'");
    auto cycle = number(w, 1, n, "cycle");
    if (w.size() < 3) bad(n, "missing record kind");
    if (w[2] == "input") {
      if (w.size() != 5) bad(n, "expected 'at <cycle> input <pin> ON|OFF'");
      auto pin = number(w, 3, n, "pin");
      if (pin < 1 || pin > 255) bad(n, "pin out of range");
      s.inputs.push_back({cycle, static_cast<int>(pin), level(w, 4, n)});
      continue;
    }
    if (w[2] != "fault") bad(n, "expected 'input' or 'fault'");
    if (w.size() < 4) bad(n, "missing fault kind");
    Fault f;
    f.at_cycle = cycle;
    const auto& kind = w[3];
    std::size_t expect = 0;
    if (kind == "ram_data_flip" || kind == "ram_code_flip") {
      f.kind = kind == "ram_data_flip" ? FaultKind::RamDataFlip : FaultKind::RamCodeFlip;
      f.uc = channel(w, 4, n);
      f.binary = binary(w, 5, n);
      f.offset = static_cast<std::uint32_t>(number(w, 6, n, "offset"));
      f.bit = static_cast<int>(number(w, 7, n, "bit"));
      expect = 8;
    } else if (kind == "stuck_output") {
      f.kind = FaultKind::StuckOutput;
      f.pin = static_cast<int>(number(w, 4, n, "pin"));
      f.on = level(w, 5, n);
      expect = 6;
    } else if (kind == "handshake_drop") {
      f.kind = FaultKind::HandshakeDrop;
      f.uc = channel(w, 4, n);
      expect = 5;
    } else if (kind == "input_divergence") {
      f.kind = FaultKind::InputDivergence;
      f.uc = channel(w, 4, n);
      f.pin = static_cast<int>(number(w, 5, n, "pin"));
      expect = 6;
    } else if (kind == "upload_corruption") {
      f.kind = FaultKind::UploadCorruption;
      if (w.size() < 5) bad(n, "missing segment");
      auto seg = codegen::parse_segment_name(w[4]);
      if (!seg) bad(n, "unknown segment '" + w[4] + "'");
      f.segment = *seg;
      f.offset = static_cast<std::uint32_t>(number(w, 5, n, "offset"));
      f.bit = static_cast<int>(number(w, 6, n, "bit"));
      expect = 7;
    } else {
      bad(n, "unknown fault kind '" + kind + "'");
    }
    if (w.size() != expect) bad(n, "wrong number of arguments for " + kind);
    if (f.bit > 7) bad(n, "bit must be 0..7");
    s.faults.push_back(f);
  }
  return s;
}

std::string format_scenario(const Scenario& s) {
  std::string out;
  for (const auto& e : s.inputs) {
    out += "at " + std::to_string(e.cycle) + " input " + std::to_string(e.pin) + (e.on ? " ON" : " OFF") + "\n";
  }
  for (const auto& f : s.faults) {
    out += "at " + std::to_string(f.at_cycle) + " fault " + std::string(fault_name(f.kind));
    auto uc = " " + std::to_string(f.uc + 1);
    switch (f.kind) {
      case FaultKind::RamDataFlip:
      case FaultKind::RamCodeFlip:
        out += uc + (f.binary == Binary::A ? " A " : " B ") + std::to_string(f.offset) + " " + std::to_string(f.bit);
        break;
      case FaultKind::StuckOutput: out += " " + std::to_string(f.pin) + (f.on ? " ON" : " OFF"); break;
      case FaultKind::HandshakeDrop: out += uc; break;
      case FaultKind::InputDivergence: out += uc + " " + std::to_string(f.pin); break;
      case FaultKind::UploadCorruption:
        out += " " + std::string(codegen::segment_name(f.segment)) + " " + std::to_string(f.offset) + " " +
               std::to_string(f.bit);
        break;
    }
    out += "\n";
  }
  out += "run " + std::to_string(s.cycles) + "\n";
  return out;
}

Trace run_scenario(codegen::ProgramImage image, const Scenario& scenario, const BoardConfig& cfg) {
  for (const auto& f : scenario.faults) {
    if (f.kind == FaultKind::UploadCorruption) corrupt(image, f.segment, f.offset, f.bit);
  }
  Board board(std::move(image), cfg);
  for (const auto& f : scenario.faults) {
    if (f.kind != FaultKind::UploadCorruption) board.schedule(f);
  }
  Trace t;
  t.input_count = board.image().io.inputs;
  t.output_count = board.image().io.outputs;

  std::multimap<std::uint64_t, InputEvent> by_cycle;
  for (const auto& e : scenario.inputs) by_cycle.emplace(e.cycle, e);
  kernel::InputVector lines(static_cast<std::size_t>(t.input_count), kIoOff);
  if (board.panicked()) {
    t.panicked = true;
    t.panics = board.panic_records();
    return t;
  }
  for (std::uint64_t c = 0; c < scenario.cycles; ++c) {
    auto [lo, hi] = by_cycle.equal_range(c);
    for (auto it = lo; it != hi; ++it) {
      auto pin = static_cast<std::size_t>(it->second.pin);
      if (pin >= 1 && pin <= lines.size()) lines[pin - 1] = it->second.on ? kIoOn : kIoOff;
    }
    auto rep = board.step(lines);
    t.cycles.push_back(std::move(rep));
    t.variables.push_back(board.variables(0, Binary::A));
    if (board.panicked()) break;
  }
  t.panicked = board.panicked();
  t.end_cycle = t.panicked ? *board.panic_cycle() : board.cycle();
  t.panics = board.panic_records();
  return t;
}

std::string format_trace_text(const Trace& t) {
  std::string out;
  for (const auto& r : t.cycles) {
    out += "C" + std::to_string(r.cycle) + " IN=" + mask_hex(is_on(r.inputs[0]), t.input_count) +
           " OUTMEM=" + mask_hex(is_on(r.out_mem), t.output_count) + " OUTPHY=" + mask_hex(r.out_phy, t.output_count) +
           " EVT=" + event_list(r) + "\n";
  }
  if (t.panicked) {
    out += "PANIC C" + std::to_string(t.end_cycle);
    for (const auto& p : t.panics) out += " uc" + std::to_string(p.uc + 1) + "=" + std::string(reason_name(p.reason));
    out += "\n";
  } else {
    out += "END C" + std::to_string(t.end_cycle) + " RUNNING\n";
  }
  return out;
}

std::string format_trace_json(const Trace& t) {
  nlohmann::ordered_json j;
  j["inputs"] = t.input_count;
  j["outputs"] = t.output_count;
  auto cycles = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < t.cycles.size(); ++i) {
    const auto& r = t.cycles[i];
    nlohmann::ordered_json c;
    c["cycle"] = r.cycle;
    c["ms"] = r.ms;
    c["in"] = {r.inputs[0], r.inputs[1]};
    c["out_mem"] = r.out_mem;
    c["out_phy"] = r.out_phy;
    c["events"] = r.events;
    auto vars = nlohmann::ordered_json::object();
    for (const auto& [name, v] : t.variables[i]) vars[name] = v;
    c["vars"] = vars;
    cycles.push_back(std::move(c));
  }
  j["cycles"] = cycles;
  j["status"] = t.panicked ? "PANIC" : "RUNNING";
  j["end_cycle"] = t.end_cycle;
  auto panics = nlohmann::ordered_json::array();
  for (const auto& p : t.panics) {
    panics.push_back({{"uc", p.uc + 1}, {"reason", reason_name(p.reason)}, {"detail", p.detail}});
  }
  j["panics"] = panics;
  return j.dump(1) + "\n";
}

}  // namespace vigil::vm
