// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "executors.hpp"
#include "random_netlist.hpp"
#include "random_program.hpp"
#include "sm_harness.hpp"
#include "vigil/checker/checker.hpp"
#include "vigil/codegen/image.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/kernel/interpreter.hpp"
#include "vigil/kernel/parser.hpp"
#include "vigil/kernel/validator.hpp"
#include "vigil/relay/netlist.hpp"
#include "vigil/relay/settle.hpp"
#include "vigil/relay/translate.hpp"
#include "vigil/sm/normalize.hpp"
#include "vigil/sm/pinmap.hpp"
#include "vigil/sm/translate.hpp"
#include "vigil/vm/board.hpp"
#include "vigil/vm/scenario.hpp"

using namespace vigil;
using kernel::kIoOff;
using kernel::kIoOn;
using vm::PanicReason;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const std::string kFix = VIGIL_FIXTURES;

std::string fixture(const std::string& rel) { return text::read_file(kFix + "/" + rel); }

kernel::CyclicProgram load(const std::string& src) { return kernel::prepare(kernel::parse_program(src)); }

codegen::ProgramImage build(const kernel::CyclicProgram& a, const kernel::CyclicProgram& b,
                            const codegen::MemoryLayout& layout = {}) {
  return codegen::link(codegen::compile_a(a), codegen::compile_b(b), a.io, layout);
}

codegen::ProgramImage build(const kernel::CyclicProgram& p) { return build(p, p); }

template <class F>
std::string error_code(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

std::string reason_of(const vm::Trace& t) {
  return t.panics.empty() ? "none" : std::string(vm::reason_name(t.panics[0].reason));
}

kernel::InputVector random_lines(std::mt19937_64& rng, int n = 20) {
  kernel::InputVector v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng() & 1 ? kIoOn : kIoOff;
  return v;
}

// --- AC1 -------------------------------------------------------------------

Outcome ac1() {
  Outcome o;
  int green = 0, total = 0;
  auto expect = [&](const std::string& name, const std::string& got, const std::string& want) {
    ++total;
    if (got == want) {
      ++green;
    } else {
      o.pass = false;
      o.detail += " " + name + ":" + got + "!=" + want;
    }
  };
  struct CheckRow {
    const char* file;
    int row;
    const char* code;
  };
  for (const CheckRow& r : {CheckRow{"row01_spec_typing.ckp", 1, "E_TYPE"}, CheckRow{"row03_impl_typing.ckp", 3, "E_TYPE"},
                            CheckRow{"row06_overflow_op.ckp", 6, "E_OVERFLOW_OP"},
                            CheckRow{"row07_multi_cond.ckp", 7, "E_MULTI_COND"},
                            CheckRow{"row08_untyped_local.ckp", 8, "E_UNTYPED_LOCAL"}}) {
    auto rep = kernel::validate(kernel::parse_program(fixture(std::string("ac1/") + r.file)));
    std::string got = rep.errors.empty() ? "ok" : "ROW" + std::to_string(rep.errors[0].row) + " " + rep.errors[0].code;
    expect(r.file, got, "ROW" + std::to_string(r.row) + " " + r.code);
  }

  auto base = load(fixture("ac1/base.ckp"));
  expect("row10", error_code([&] { build(base, load(fixture("ac1/row10_renamed.ckp"))); }), "E_NAME_MISMATCH");
  expect("row11", error_code([&] { build(base, base, codegen::parse_layout(fixture("ac1/row11_overlap.layout"))); }),
         "E_MEM_OVERLAP");

  auto sim = [&](const codegen::ProgramImage& img, const std::string& scn) {
    return vm::run_scenario(img, vm::parse_scenario(fixture("ac1/" + scn)));
  };
  expect("row12", reason_of(sim(build(base, load(fixture("ac1/row12_wrong_code.ckp"))), "row12_wrong_code.scn")),
         "DATA_MISMATCH");

  auto bytes = codegen::serialize(build(base));
  bytes[bytes.size() - 12] ^= 0x04;  // inside the last payload
  expect("row13_file", error_code([&] { vm::Board b(codegen::deserialize(bytes)); }), "E_UPLOAD_CRC");
  expect("row13_upload", error_code([&] { sim(build(base), "row13_upload_corruption.scn"); }), "E_UPLOAD_CRC");
  expect("row14", reason_of(sim(build(base), "row14_ram_data_flip.scn")), "DATA_MISMATCH");
  expect("row15", reason_of(sim(build(base), "row15_ram_code_flip.scn")), "PROGRAM_MISMATCH");
  expect("row16", reason_of(sim(build(base), "row16_handshake_drop.scn")), "HANDSHAKE_TIMEOUT");
  expect("row17", reason_of(sim(build(base), "row17_stuck_output.scn")), "OUTPUT_FEEDBACK");
  o.detail = std::to_string(green) + "/" + std::to_string(total) + " fixtures green" + o.detail;
  o.pass = o.pass && total == 14;
  return o;
}

// --- AC2 -------------------------------------------------------------------

Outcome ac2() {
  Outcome o;
  auto img = build(load(fixture("ac1/base.ckp")));
  std::ostringstream d;
  for (std::uint32_t period : {1u, 5u, 10u}) {
    vm::BoardConfig cfg;
    cfg.cycle_ms = period;
    std::uint32_t worst = 0;
    bool exact = true;
    // every phase of the drop relative to the handshake schedule
    for (std::uint64_t start = 20; start < 20 + 2 * vm::handshake_interval(cfg) + 2; ++start) {
      vm::Board b(img, cfg);
      vm::Fault f;
      f.kind = vm::FaultKind::HandshakeDrop;
      f.at_cycle = start;
      f.uc = 1;
      b.schedule(f);
      std::uint32_t last_hs = 0, drop_ms = 0, panic_ms = 0;
      bool panicked = false;
      for (int c = 0; c < 400 && !panicked; ++c) {
        auto rep = b.step(kernel::InputVector(20, kIoOff));
        if (rep.cycle == start) drop_ms = rep.ms;
        for (const auto& e : rep.events) {
          if (e == "HS") last_hs = rep.ms;
        }
        for (const auto& p : rep.panics) {
          if (p.reason == PanicReason::HandshakeTimeout) {
            panicked = true;
            panic_ms = rep.ms;
          }
        }
        if (b.panicked() && !panicked) break;
      }
      if (!panicked) {
        o.pass = false;
        d << " period " << period << ": no timeout for drop at cycle " << start;
        continue;
      }
      worst = std::max(worst, panic_ms - drop_ms);
      exact = exact && panic_ms - last_hs == 50;
    }
    o.pass = o.pass && worst <= 50 && exact;
    d << " " << period << "ms: worst latency " << worst << " ms" << (exact ? ", timeout 50 ms after last handshake" : ", NOT exact") << ";";
  }
  o.detail = d.str();
  return o;
}

// --- AC3 -------------------------------------------------------------------

Outcome ac3() {
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0, identical_bytes = 0, programs = 0, comparisons = 0;
  std::string first;
  for (int n = 0; n < 500; ++n) {
    testing::GenOptions g;
    g.inputs = 1 + static_cast<int>(rng() % 6);
    g.outputs = 1 + static_cast<int>(rng() % 4);
    g.states = static_cast<int>(rng() % 8);
    g.locals = static_cast<int>(rng() % 3);
    g.max_stmts = 4 + static_cast<int>(rng() % 12);
    auto p = load(testing::random_program(rng, g));
    ++programs;
    auto a = codegen::compile_a(p);
    auto b = codegen::compile_b(p);
    if (a.code == b.encode()) ++identical_bytes;
    testing::BinaryRunner ra(a), rb(b);
    auto store = kernel::initial_store(p);
    for (std::uint32_t c = 0; c < 200; ++c) {
      auto in = random_lines(rng);
      std::uint32_t clock = c * 5;
      store = kernel::interpret_cycle(p, store, in, clock).store;
      ra.cycle(in, clock);
      rb.cycle(in, clock);
      for (std::size_t i = 0; i < p.decls.size(); ++i) {
        const auto& d = p.decls[i];
        if (d.kind == kernel::VarKind::Constant || d.kind == kernel::VarKind::Local) continue;
        ++comparisons;
        if (ra.value(d.name) != store[i] || rb.value(d.name) != store[i]) {
          if (mismatches++ == 0) first = " first: program " + std::to_string(n) + " cycle " + std::to_string(c) + " " + d.name;
        }
      }
    }
  }
  Outcome o;
  o.pass = mismatches == 0 && identical_bytes == 0;
  o.detail = std::to_string(programs) + " programs x 200 cycles, " + std::to_string(comparisons) + " comparisons, " +
             std::to_string(mismatches) + " mismatches, " + std::to_string(identical_bytes) +
             " programs with identical A/B bytes" + first;
  return o;
}

// --- AC4 -------------------------------------------------------------------

Outcome ac4() {
  std::mt19937_64 rng(404);
  testing::GenOptions g;
  g.inputs = 4;
  g.outputs = 4;
  g.states = 12;
  g.locals = 0;
  g.constants = 0;
  g.max_stmts = 14;
  auto p = load(testing::random_program(rng, g));
  int vars = 0;
  for (const auto& d : p.decls) vars += d.kind != kernel::VarKind::Constant && d.kind != kernel::VarKind::Local;
  auto img = build(p);
  std::vector<kernel::InputVector> inputs;
  for (int c = 0; c < 400; ++c) inputs.push_back(random_lines(rng));

  const std::uint64_t at = 6;
  std::size_t data_flips = 0, data_detected = 0;
  vm::Board probe(img);
  for (int uc = 0; uc < 2; ++uc) {
    for (auto bin : {vm::Binary::A, vm::Binary::B}) {
      auto bytes = probe.data(uc, bin).size();
      for (std::uint32_t off = 0; off < bytes; ++off) {
        for (int bit = 0; bit < 8; ++bit) {
          vm::Board b(img);
          vm::Fault f;
          f.kind = vm::FaultKind::RamDataFlip;
          f.at_cycle = at;
          f.uc = uc;
          f.binary = bin;
          f.offset = off;
          f.bit = bit;
          b.schedule(f);
          for (std::uint64_t c = 0; c <= at + 1 && !b.panicked(); ++c) b.step(inputs[c]);
          ++data_flips;
          if (b.panicked() && *b.panic_cycle() <= at + 1) ++data_detected;
        }
      }
    }
  }

  std::size_t code_flips = 0, code_detected = 0;
  std::uint32_t sweep = probe.sweep_length();
  for (int k = 0; k < 1000; ++k) {
    vm::Board b(img);
    vm::Fault f;
    f.kind = vm::FaultKind::RamCodeFlip;
    f.at_cycle = 3 + rng() % 50;
    f.uc = static_cast<int>(rng() % 2);
    f.binary = rng() & 1 ? vm::Binary::A : vm::Binary::B;
    f.offset = static_cast<std::uint32_t>(rng() % b.code(f.uc, f.binary).size());
    f.bit = static_cast<int>(rng() % 8);
    b.schedule(f);
    for (std::uint64_t c = 0; c <= f.at_cycle + sweep && !b.panicked(); ++c) b.step(inputs[c]);
    ++code_flips;
    if (b.panicked() && *b.panic_cycle() <= f.at_cycle + sweep) ++code_detected;
  }
  Outcome o;
  o.pass = vars == 20 && data_detected == data_flips && code_detected == code_flips;
  o.detail = std::to_string(vars) + "-variable program; data flips " + std::to_string(data_detected) + "/" +
             std::to_string(data_flips) + " detected within 1 cycle; code flips " + std::to_string(code_detected) +
             "/" + std::to_string(code_flips) + " detected within one sweep (" + std::to_string(sweep) + " cycles)";
  return o;
}

// --- AC5 -------------------------------------------------------------------

struct RelayCompare {
  std::size_t vectors = 0, mismatches = 0;
};

// Every input vector from the all-inactive state, then a random walk that
// carries relay state on both sides.
RelayCompare compare_relay(const relay::Netlist& n, std::mt19937_64& rng) {
  RelayCompare rc;
  auto tr = relay::translate_relay(n);
  const auto& p = tr.program;
  auto pins_of = [&](const relay::InputState& in) {
    kernel::InputVector pins(20, kIoOff);
    for (std::size_t i = 0; i < in.size(); ++i) {
      pins[static_cast<std::size_t>(p.decl("i_" + n.inputs[i]).pin - 1)] = in[i] ? kIoOn : kIoOff;
    }
    return pins;
  };
  auto agree = [&](const kernel::CycleOutcome& c, const relay::SettleResult& r) {
    if (!r.fixed_point) return c.vital_fault();
    if (c.vital_fault()) return false;
    for (std::size_t y = 0; y < n.outputs.size(); ++y) {
      if (c.outputs[static_cast<std::size_t>(p.decl("o_" + n.outputs[y]).pin - 1)] != (r.outputs[y] ? kIoOn : kIoOff)) {
        return false;
      }
    }
    return true;
  };
  std::size_t k = n.inputs.size();
  relay::RelayState none(n.relays.size(), false);
  for (std::uint32_t v = 0; v < (1u << k); ++v) {
    relay::InputState in(k);
    for (std::size_t i = 0; i < k; ++i) in[i] = (v >> i) & 1u;
    auto c = kernel::interpret_cycle(p, kernel::initial_store(p), pins_of(in), 0);
    ++rc.vectors;
    if (!agree(c, relay::settle(n, in, none, tr.max_iter))) ++rc.mismatches;
  }
  auto store = kernel::initial_store(p);
  relay::RelayState prev = none;
  for (int step = 0; step < 64; ++step) {
    relay::InputState in(k);
    for (std::size_t i = 0; i < k; ++i) in[i] = rng() & 1;
    auto c = kernel::interpret_cycle(p, store, pins_of(in), 0);
    auto r = relay::settle(n, in, prev, tr.max_iter);
    ++rc.vectors;
    if (!agree(c, r)) ++rc.mismatches;
    if (!r.fixed_point) break;  // the board would be in panic
    store = c.store;
    prev = r.relays;
  }
  return rc;
}

Outcome ac5() {
  Outcome o;
  std::mt19937_64 rng(505);
  auto fig = relay::parse_netlist(fixture("relay/light_signal.rly"));
  auto fr = compare_relay(fig, rng);
  std::size_t vectors = fr.vectors, mismatches = fr.mismatches;
  int circuits = 0;
  for (; circuits < 50; ++circuits) {
    auto rc = compare_relay(relay::parse_netlist(testing::random_netlist(rng, 8, 5, 3)), rng);
    vectors += rc.vectors;
    mismatches += rc.mismatches;
  }
  // drawn state: default inputs from all relays inactive
  auto settled = relay::settle(fig, fig.input_default, relay::RelayState(fig.relays.size(), false), 1024);
  std::string active;
  for (std::size_t i = 0; i < fig.relays.size(); ++i) {
    if (settled.relays[i]) active += (active.empty() ? "" : ",") + fig.relays[i];
  }
  // and the same through the translated program
  auto tr = relay::translate_relay(fig);
  kernel::InputVector pins(20, kIoOff);
  for (std::size_t i = 0; i < fig.inputs.size(); ++i) {
    if (fig.input_default[i]) pins[static_cast<std::size_t>(tr.program.decl("i_" + fig.inputs[i]).pin - 1)] = kIoOn;
  }
  auto c = kernel::interpret_cycle(tr.program, kernel::initial_store(tr.program), pins, 0);
  std::string program_active;
  for (const auto& r : fig.relays) {
    if (c.store[static_cast<std::size_t>(tr.program.find("r_" + r))] == kIoOn) {
      program_active += (program_active.empty() ? "" : ",") + r;
    }
  }
  o.pass = mismatches == 0 && settled.fixed_point && active == "CRR" && program_active == "CRR";
  o.detail = "light signal + " + std::to_string(circuits) + " random circuits, " + std::to_string(vectors) +
             " input vectors, " + std::to_string(mismatches) + " mismatches; drawn state active relays: " + active +
             " (program: " + program_active + ")";
  return o;
}

// --- AC6 -------------------------------------------------------------------

struct Replay {
  std::size_t counterexamples = 0, replayed = 0;
};

// Runs the counterexample scenario on the built image and evaluates the
// property on channel 1's variables after the last cycle.
bool replays(const kernel::CyclicProgram& p, const checker::Property& prop, const checker::CheckResult& r) {
  auto scn = checker::counterexample_scenario(p, prop, r);
  auto t = vm::run_scenario(build(p), vm::parse_scenario(scn));
  std::size_t last = r.trace.size() - 1;
  if (t.variables.size() != r.trace.size()) return false;
  auto store = kernel::initial_store(p);
  for (const auto& [name, v] : t.variables[last]) {
    int i = p.find(name);
    if (i >= 0) store[static_cast<std::size_t>(i)] = v;
  }
  if (t.panicked) {
    bool vital = false;
    for (const auto& pr : t.panics) vital |= pr.reason == PanicReason::VitalCode;
    if (!vital || t.end_cycle != last) return false;
    for (std::size_t i = 0; i < p.decls.size(); ++i) {
      if (p.decls[i].kind == kernel::VarKind::Output) store[i] = kIoOff;
    }
  }
  checker::Formula f = prop.formula;
  checker::bind(f, p);
  return !checker::holds(f, p, store);
}

Outcome ac6() {
  Outcome o;
  Replay rp;
  double slowest = 0;
  std::string slowest_name;
  auto check_all = [&](const std::string& name, const kernel::CyclicProgram& p,
                       const std::vector<checker::Property>& props) {
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& prop : props) {
      auto r = checker::model_check(p, prop);
      if (r.verified) continue;
      ++rp.counterexamples;
      if (replays(p, prop, r)) ++rp.replayed;
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > slowest) {
      slowest = s;
      slowest_name = name;
    }
  };
  auto relay_program = [&](const std::string& f) {
    return relay::translate_relay(relay::parse_netlist(fixture("relay/" + f))).program;
  };
  auto signal_props = checker::parse_properties(fixture("relay/light_signal.prop"));
  check_all("light_signal", relay_program("light_signal.rly"), signal_props);
  std::size_t broken_before = rp.counterexamples;
  check_all("light_signal_broken", relay_program("light_signal_broken.rly"), signal_props);
  std::size_t broken_cex = rp.counterexamples - broken_before;
  check_all("pass_through", relay_program("pass_through.rly"), checker::parse_properties("follows: o_Q = OFF | i_A\nnever: o_Q = OFF\n"));
  check_all("oscillator", relay_program("oscillator.rly"), checker::parse_properties("quiet: o_Q = OFF\n"));

  // more counterexamples: random circuits against an exclusion property
  std::mt19937_64 rng(606);
  for (int k = 0; k < 40; ++k) {
    auto n = relay::parse_netlist(testing::random_netlist(rng, 8, 4, 2));
    if (n.outputs.size() < 2) continue;
    auto p = relay::translate_relay(n).program;
    check_all("random", p, checker::parse_properties("excl: !(o_Y0 & o_Y1)\nfollow: o_Y0 => i_I0\n"));
  }
  o.pass = broken_cex > 0 && rp.replayed == rp.counterexamples && slowest < 10.0;
  std::ostringstream d;
  d << rp.replayed << "/" << rp.counterexamples << " counterexamples replay to a violating state (" << broken_cex
    << " from the broken light signal); slowest relay fixture " << slowest_name << " " << slowest << " s";
  o.detail = d.str();
  return o;
}

// --- AC7 -------------------------------------------------------------------

Outcome ac7() {
  Outcome o;
  auto model = sm::parse_csm(fixture("sm/obstacle.csm"));
  auto nm = sm::normalize(model, model.machines[0]);

  // timer through the compiled program on the board
  auto tr = sm::translate_sm(model, 100);
  vm::BoardConfig cfg;  // 5 ms
  vm::Board board(build(tr.program), cfg);
  std::mt19937_64 rng(707);
  std::vector<std::uint32_t> fires;
  std::uint32_t prev_time = board.value(0, vm::Binary::A, sm::time_var(model.machines[0]));
  kernel::InputVector lines(20, kIoOff);
  for (int c = 0; c < 4000; ++c) {
    if (rng() % 40 == 0) lines[0] = lines[0] == kIoOn ? kIoOff : kIoOn;
    auto rep = board.step(lines);
    auto t = board.value(0, vm::Binary::A, sm::time_var(model.machines[0]));
    if (t != prev_time) fires.push_back(rep.ms);
    prev_time = t;
  }
  std::uint32_t lo = ~0u, hi = 0;
  for (std::size_t k = 1; k < fires.size(); ++k) {
    lo = std::min(lo, fires[k] - fires[k - 1]);
    hi = std::max(hi, fires[k] - fires[k - 1]);
  }
  bool timer_ok = !board.panicked() && fires.size() > 100 && lo >= 100 && hi < 100 + cfg.cycle_ms;

  // trace equivalence with the reference interpreter
  std::size_t traces = 0, bad = 0, model_cycles = 0;
  for (; traces < 1000; ++traces) {
    std::uint32_t unit = 5 * (1 + static_cast<std::uint32_t>(rng() % 20));  // 5..100 ms
    auto t = sm::translate_sm(model, unit);
    std::size_t cycles = static_cast<std::size_t>(1 + rng() % 100) * unit / 5;
    std::vector<std::vector<bool>> in(cycles, std::vector<bool>(1));
    bool level = false;
    int stickiness = 2 + static_cast<int>(rng() % 20);
    for (auto& row : in) {
      if (static_cast<int>(rng() % static_cast<unsigned>(stickiness)) == 0) level = !level;
      row[0] = level;
    }
    auto run = testing::run_sm_equivalence(model, t, 5, in);
    model_cycles += run.model_cycles;
    bad += run.mismatches > 0;
  }
  o.pass = nm.states.size() == 3 && timer_ok && bad == 0;
  std::ostringstream d;
  d << nm.states.size() << " normalized states; board firing interval " << lo << ".." << hi << " ms over "
    << fires.size() << " model cycles; " << traces - bad << "/" << traces << " traces equivalent (" << model_cycles
    << " model cycles)";
  o.detail = d.str();
  return o;
}

// --- AC8 -------------------------------------------------------------------

Outcome ac8() {
  std::mt19937_64 rng(808);
  auto base = load(fixture("ac1/base.ckp"));
  auto img = build(base);
  auto osc = build(relay::translate_relay(relay::parse_netlist(fixture("relay/oscillator.rly"))).program);
  struct Case {
    PanicReason reason;
    std::string scn;
    const codegen::ProgramImage* image;
  };
  std::vector<Case> cases = {
      {PanicReason::InputDivergence, "at 0 input 1 ON\nat 8 fault input_divergence 1 2\nrun 20\n", &img},
      {PanicReason::DataMismatch, "at 0 input 1 ON\nat 8 fault ram_data_flip 2 B 1 4\nrun 20\n", &img},
      {PanicReason::ProgramMismatch, "at 0 input 1 ON\nat 8 fault ram_code_flip 1 A 0 7\nrun 200\n", &img},
      {PanicReason::HandshakeTimeout, "at 0 input 1 ON\nat 8 fault handshake_drop 1\nrun 60\n", &img},
      {PanicReason::OutputFeedback, "at 0 input 1 ON\nat 8 fault stuck_output 1 OFF\nrun 20\n", &img},
      {PanicReason::VitalCode, "at 8 input 1 ON\nrun 20\n", &osc},
  };
  std::size_t cycles = 0, off = 0, reasons = 0;
  const std::size_t per_case = 10000 / cases.size() + 1;
  for (const auto& cs : cases) {
    vm::Board b(*cs.image);
    auto sc = vm::parse_scenario(cs.scn);
    for (const auto& f : sc.faults) b.schedule(f);
    kernel::InputVector lines(20, kIoOff);
    for (std::uint64_t c = 0; c < sc.cycles && !b.panicked(); ++c) {
      for (const auto& e : sc.inputs) {
        if (e.cycle == c) lines[static_cast<std::size_t>(e.pin - 1)] = e.on ? kIoOn : kIoOff;
      }
      b.step(lines);
    }
    if (!b.panicked() || b.panic_records().empty() || b.panic_records()[0].reason != cs.reason) continue;
    ++reasons;
    for (std::size_t k = 0; k < per_case; ++k) {
      auto rep = b.step(random_lines(rng));
      ++cycles;
      bool all_off = true;
      for (bool v : rep.out_phy) all_off = all_off && !v;
      for (bool v : b.physical_outputs()) all_off = all_off && !v;
      off += all_off;
    }
  }
  Outcome o;
  o.pass = reasons == cases.size() && cycles >= 10000 && off == cycles;
  o.detail = std::to_string(reasons) + "/" + std::to_string(cases.size()) + " panic reasons reached; outputs OFF in " +
             std::to_string(off) + "/" + std::to_string(cycles) + " post-panic cycles";
  return o;
}

// --- AC9 -------------------------------------------------------------------

Outcome ac9() {
  std::size_t rejected = 0, total = 0;
  for (const char* f : {"obstacle_av_m1.csm", "obstacle_av_8.csm", "obstacle_lv_m1.csm", "obstacle_lv_8.csm"}) {
    ++total;
    rejected += error_code([&] { sm::translate_sm(sm::parse_csm(fixture(std::string("sm/") + f)), 100); }) == "E_CONST_RANGE";
  }
  auto model = sm::parse_csm(fixture("sm/obstacle.csm"));
  for (const char* c : {"av", "lv"}) {
    for (std::int64_t v : {-1, 8}) {
      ++total;
      rejected += error_code([&] { sm::translate_sm(model, 100, {{c, v}}); }) == "E_CONST_RANGE";
    }
  }
  for (std::int64_t v : {-1, 8}) {
    ++total;
    rejected += error_code([&] { sm::encode_arg(v); }) == "E_CONST_RANGE";
  }
  bool in_range = true;
  for (std::int64_t v : {0, 7}) {
    in_range = in_range && error_code([&] { sm::translate_sm(model, 100, {{"av", v == 0 ? 1 : v}, {"lv", v}}); }) == "none";
  }
  Outcome o;
  o.pass = rejected == total && in_range;
  o.detail = std::to_string(rejected) + "/" + std::to_string(total) + " out-of-range cases rejected with E_CONST_RANGE" +
             (in_range ? "; bounds 0 and 7 accepted" : "; a bound was rejected");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},
  };
  bool all = true;
  auto start = std::chrono::steady_clock::now();
  for (const auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s (%.2f s)\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
    std::fflush(stdout);
    all = all && o.pass;
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance %s in %.2f s\n", all ? "PASS" : "FAIL", total);
  return all ? 0 : 1;
}
