#include <random>
#include <set>

#include "doctest.h"
#include "random_netlist.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/kernel/interpreter.hpp"
#include "vigil/kernel/validator.hpp"
#include "vigil/relay/netlist.hpp"
#include "vigil/relay/settle.hpp"
#include "vigil/relay/translate.hpp"

using namespace vigil;
using namespace vigil::relay;

namespace {

Netlist fixture(const std::string& name) {
  return parse_netlist(text::read_file(std::string(VIGIL_FIXTURES) + "/relay/" + name));
}

// One settling pass by reachability: a strand carries current when all its
// contacts are closed, its start is fed from a live source and its end leads
// on to a sink.
RelayState oracle_pass(const Netlist& n, const InputState& in, const RelayState& act, std::vector<bool>* outputs) {
  auto closed = [&](const Strand& s) {
    for (const auto& e : s.elements) {
      if (e.kind == ContactKind::NormallyOpen && !act[e.relay]) return false;
      if (e.kind == ContactKind::NormallyClosed && act[e.relay]) return false;
    }
    return true;
  };
  auto live = [&](const Terminal& t) {
    return t.kind == TerminalKind::Positive || (t.kind == TerminalKind::Input && in[t.index]);
  };
  std::set<int> fed, drains;  // junction indices
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& s : n.strands) {
      if (!closed(s) || s.to.kind != TerminalKind::Junction) continue;
      bool src = live(s.from) || (s.from.kind == TerminalKind::Junction && fed.count(s.from.index));
      if (src && fed.insert(s.to.index).second) grew = true;
    }
    for (const auto& s : n.strands) {
      if (!closed(s) || s.from.kind != TerminalKind::Junction) continue;
      bool sink = s.to.kind == TerminalKind::Negative || s.to.kind == TerminalKind::Output ||
                  (s.to.kind == TerminalKind::Junction && drains.count(s.to.index));
      if (sink && drains.insert(s.from.index).second) grew = true;
    }
  }
  RelayState next(n.relays.size(), false);
  if (outputs) outputs->assign(n.outputs.size(), false);
  for (const auto& s : n.strands) {
    if (!closed(s)) continue;
    bool src = live(s.from) || (s.from.kind == TerminalKind::Junction && fed.count(s.from.index));
    bool sink = s.to.kind == TerminalKind::Negative || s.to.kind == TerminalKind::Output ||
                (s.to.kind == TerminalKind::Junction && drains.count(s.to.index));
    if (!src || !sink) continue;
    for (const auto& e : s.elements) {
      if (e.kind == ContactKind::Coil) next[e.relay] = true;
    }
    if (outputs && s.to.kind == TerminalKind::Output) (*outputs)[s.to.index] = true;
  }
  return next;
}

InputState vector_of(std::size_t k, std::uint32_t v) {
  InputState in(k);
  for (std::size_t i = 0; i < k; ++i) in[i] = (v >> i) & 1u;
  return in;
}

}  // namespace

TEST_CASE("light signal: nine relays in drawing order") {
  auto n = fixture("light_signal.rly");
  CHECK(n.relays == std::vector<std::string>{"CM", "CFR", "RPCS", "CRR", "CA", "RPA", "BS", "EX1", "EX2"});
}

TEST_CASE("light signal: in the drawn state only CRR is active") {
  auto n = fixture("light_signal.rly");
  auto r = settle(n, n.input_default, RelayState(n.relays.size(), false), default_max_iter(n));
  REQUIRE(r.fixed_point);
  for (std::size_t i = 0; i < n.relays.size(); ++i) CHECK_MESSAGE(r.relays[i] == (n.relays[i] == "CRR"), n.relays[i]);
}

TEST_CASE("parse errors") {
  auto code_of = [](const std::string& src) {
    try {
      parse_netlist(src);
    } catch (const ParseError& e) {
      return e.diagnostics().at(0).code;
    }
    return std::string();
  };
  CHECK(code_of("RELAYS\n  A\nINPUTS\n  X\nSTRANDS\n  in(X) , no(B) , coil(A) , N-\n") == "E_UNKNOWN_RELAY");
  CHECK(code_of("RELAYS\n  A A\nSTRANDS\n  P+ , coil(A) , N-\n") == "E_DUPLICATE_NAME");
  CHECK(code_of("RELAYS\n  A\nSTRANDS\n  coil(A) , N-\n") == "E_DANGLING_STRAND");
  CHECK(code_of("RELAYS\n  A\nSTRANDS\n  N- , coil(A) , P+\n") == "E_DANGLING_STRAND");
}

TEST_CASE("format_netlist round-trips") {
  auto n = fixture("light_signal.rly");
  CHECK(format_netlist(parse_netlist(format_netlist(n))) == format_netlist(n));
}

TEST_CASE("oscillating circuit is reported and panics at runtime") {
  auto n = fixture("oscillator.rly");
  auto r = settle(n, {true}, RelayState(2, false), default_max_iter(n));
  CHECK_FALSE(r.fixed_point);
  auto tr = translate_relay(n);
  REQUIRE(tr.oscillating_inputs);
  CHECK((*tr.oscillating_inputs)[0]);
  kernel::InputVector in(20, kernel::kIoOff);
  in[0] = kernel::kIoOn;
  auto c = kernel::interpret_cycle(tr.program, kernel::initial_store(tr.program), in, 0);
  CHECK(c.vital_fault());
}

TEST_CASE("too many inputs for the board") {
  auto n = fixture("light_signal.rly");
  CHECK_THROWS_AS(translate_relay(n, 0, {2, 8}), Error);
}

TEST_CASE("property: settle passes agree with a reachability oracle") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 200; ++k) {
    auto src = testing::random_netlist(rng);
    CAPTURE(src);
    auto n = parse_netlist(src);
    for (int t = 0; t < 20; ++t) {
      InputState in = vector_of(n.inputs.size(), static_cast<std::uint32_t>(rng()));
      RelayState act(n.relays.size());
      for (std::size_t i = 0; i < act.size(); ++i) act[i] = rng() & 1;
      std::vector<bool> outs;
      REQUIRE(next_relays(n, in, act) == oracle_pass(n, in, act, &outs));
      REQUIRE(output_states(n, in, act) == outs);
    }
  }
}

TEST_CASE("property: the translated program reproduces settle from any relay state") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 60; ++k) {
    auto src = testing::random_netlist(rng);
    CAPTURE(src);
    auto n = parse_netlist(src);
    auto tr = translate_relay(n);
    const auto& p = tr.program;
    for (std::uint32_t v = 0; v < (1u << n.inputs.size()); ++v) {
      auto in = vector_of(n.inputs.size(), v);
      RelayState prev(n.relays.size());
      for (std::size_t i = 0; i < prev.size(); ++i) prev[i] = rng() & 1;
      auto store = kernel::initial_store(p);
      for (std::size_t i = 0; i < prev.size(); ++i) {
        store[static_cast<std::size_t>(p.find("r_" + n.relays[i]))] = prev[i] ? kernel::kIoOn : kernel::kIoOff;
      }
      kernel::InputVector pins(20, kernel::kIoOff);
      for (std::size_t i = 0; i < in.size(); ++i) {
        pins[static_cast<std::size_t>(p.decl("i_" + n.inputs[i]).pin - 1)] = in[i] ? kernel::kIoOn : kernel::kIoOff;
      }
      auto c = kernel::interpret_cycle(p, store, pins, 0);
      auto r = settle(n, in, prev, tr.max_iter);
      if (!r.fixed_point) {
        REQUIRE(c.vital_fault());
        continue;
      }
      REQUIRE_FALSE(c.vital_fault());
      for (std::size_t y = 0; y < n.outputs.size(); ++y) {
        REQUIRE(c.outputs[static_cast<std::size_t>(p.decl("o_" + n.outputs[y]).pin - 1)] ==
                (r.outputs[y] ? kernel::kIoOn : kernel::kIoOff));
      }
      for (std::size_t i = 0; i < n.relays.size(); ++i) {
        REQUIRE(c.store[static_cast<std::size_t>(p.find("r_" + n.relays[i]))] ==
                (r.relays[i] ? kernel::kIoOn : kernel::kIoOff));
      }
    }
  }
}
