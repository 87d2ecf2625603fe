#include <random>

#include "doctest.h"
#include "random_program.hpp"
#include "vigil/checker/checker.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/kernel/interpreter.hpp"
#include "vigil/kernel/parser.hpp"
#include "vigil/kernel/validator.hpp"
#include "vigil/relay/netlist.hpp"
#include "vigil/relay/translate.hpp"

using namespace vigil;
using namespace vigil::checker;

namespace {

kernel::CyclicProgram relay_program(const std::string& name) {
  auto n = relay::parse_netlist(text::read_file(std::string(VIGIL_FIXTURES) + "/relay/" + name));
  return relay::translate_relay(n).program;
}

std::vector<Property> signal_props() {
  return parse_properties(text::read_file(std::string(VIGIL_FIXTURES) + "/relay/light_signal.prop"));
}

// Shortest violation length by enumerating every input sequence.
int brute_force(const kernel::CyclicProgram& p, const Property& prop, int depth) {
  Formula f = prop.formula;
  bind(f, p);
  std::vector<int> pins;
  for (const auto& d : p.decls) {
    if (d.kind == kernel::VarKind::Input) pins.push_back(d.pin);
  }
  std::uint32_t vectors = 1u << pins.size();
  std::vector<kernel::VarStore> level{kernel::initial_store(p)};
  for (int k = 1; k <= depth; ++k) {
    std::vector<kernel::VarStore> next;
    for (const auto& s : level) {
      for (std::uint32_t v = 0; v < vectors; ++v) {
        kernel::InputVector in(static_cast<std::size_t>(p.io.inputs), kernel::kIoOff);
        for (std::size_t i = 0; i < pins.size(); ++i) {
          in[static_cast<std::size_t>(pins[i] - 1)] = (v >> i) & 1u ? kernel::kIoOn : kernel::kIoOff;
        }
        auto c = kernel::interpret_cycle(p, s, in, 0);
        auto seen = c.store;
        if (c.vital_fault()) {
          for (std::size_t i = 0; i < p.decls.size(); ++i) {
            if (p.decls[i].kind == kernel::VarKind::Output) seen[i] = kernel::kIoOff;
          }
        }
        if (!holds(f, p, seen)) return k;
        if (!c.vital_fault()) next.push_back(std::move(c.store));
      }
    }
    level = std::move(next);
  }
  return 0;
}

template <class F>
std::string thrown_code(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("formula parsing and precedence") {
  CHECK(format_formula(parse_formula("a & b | c => d")) == "(((a = ON & b = ON) | c = ON) => d = ON)");
  CHECK(format_formula(parse_formula("a => b => c")) == "(a = ON => (b = ON => c = ON))");
  CHECK(format_formula(parse_formula("not x != 3 and y = OFF")) == "(!(x != 3) & y = OFF)");
  CHECK(format_formula(parse_formula("!(true | false)")) == "!((true | false))");
  CHECK_THROWS_AS(parse_formula("a &"), Error);
  CHECK_THROWS_AS(parse_formula("a = maybe"), Error);
}

TEST_CASE("property files") {
  auto props = signal_props();
  REQUIRE(props.size() == 4);
  CHECK(props[0].name == "green_red_exclusive");
  try {
    parse_properties("p: a\np: b\nq a\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.diagnostics().size() == 2);
    CHECK(e.diagnostics()[0].code == "E_DUPLICATE_NAME");
    CHECK(e.diagnostics()[1].code == "E_SYNTAX");
  }
}

TEST_CASE("unknown registers and locals are rejected") {
  auto p = relay_program("light_signal.rly");
  CHECK(thrown_code([&] { model_check(p, parse_properties("p: o_BLUE\n")[0]); }) == "E_UNKNOWN_NAME");
}

TEST_CASE("true always verifies; the correct signal verifies everything") {
  auto p = relay_program("light_signal.rly");
  auto t = model_check(p, parse_properties("t: true\n")[0]);
  CHECK(t.verified);
  for (const auto& prop : signal_props()) {
    auto r = model_check(p, prop);
    CHECK_MESSAGE(r.verified, prop.name);
    CHECK(r.exhaustive);
  }
}

TEST_CASE("the broken signal has a shortest counterexample") {
  auto p = relay_program("light_signal_broken.rly");
  auto props = signal_props();
  auto r = model_check(p, props[2]);
  REQUIRE_FALSE(r.verified);
  CHECK(r.trace.size() == static_cast<std::size_t>(brute_force(p, props[2], 3)));
  auto scn = counterexample_scenario(p, props[2], r);
  CHECK(scn.find("run " + std::to_string(r.trace.size())) != std::string::npos);
}

TEST_CASE("clock readers and oversized spaces are refused") {
  auto clocky = kernel::prepare(kernel::parse_program("OUTPUTS\n  q : io\nSTATE\n  t : u32 = 0\nLOGIC\n  t := get_ms_tick()\n"));
  CHECK(thrown_code([&] { model_check(clocky, parse_properties("p: true\n")[0]); }) == "E_UNBOUNDED_VAR");

  auto counter = kernel::prepare(kernel::parse_program(
      "INPUTS\n  a : io\nOUTPUTS\n  q : io\nSTATE\n  n : u32 = 0\nLOGIC\n  if a = IO_ON\n    n := add_u32(n, 1)\n"));
  CheckOptions opt;
  opt.depth = 1000;
  opt.max_states = 500;  // one new state per level, two vectors each
  CHECK(thrown_code([&] { model_check(counter, parse_properties("p: true\n")[0], opt); }) == "E_STATE_EXPLOSION");

  std::string wide = "INPUTS\n";
  for (int i = 0; i < 20; ++i) wide += "  i" + std::to_string(i) + " : io\n";
  wide += "OUTPUTS\n  q : io\nLOGIC\n  q := i0\n";
  opt.max_states = 1000;
  CHECK(thrown_code([&] { model_check(kernel::prepare(kernel::parse_program(wide)), parse_properties("p: true\n")[0], opt); }) ==
        "E_STATE_EXPLOSION");
}

TEST_CASE("a panicking state reads every output as OFF") {
  auto p = relay_program("oscillator.rly");
  auto off = model_check(p, parse_properties("p: o_Q = OFF | i_EN = OFF\n")[0]);
  CHECK(off.verified == (brute_force(p, parse_properties("p: o_Q = OFF | i_EN = OFF\n")[0], 4) == 0));
}

TEST_CASE("property: verdicts and counterexample lengths match brute force") {
  std::mt19937_64 rng(51);
  testing::GenOptions g;
  g.inputs = 2;
  g.outputs = 2;
  g.states = 3;
  g.locals = 1;
  g.clock = false;
  const char* atoms[] = {"out0", "out1", "out0 = OFF", "in0 => out1", "out0 & !out1", "out1 | in1"};
  int counterexamples = 0;
  for (int n = 0; n < 80; ++n) {
    auto src = testing::random_program(rng, g);
    CAPTURE(src);
    auto p = kernel::prepare(kernel::parse_program(src));
    auto text = std::string("p: ") + (rng() & 1 ? "!" : "") + "(" + atoms[rng() % 6] + ")";
    text += rng() & 1 ? " | " : " & ";
    text += atoms[rng() % 6];
    std::string s = text;
    // inputs are registers named in0/in1 in generated programs
    auto prop = parse_properties(s + "\n")[0];
    CAPTURE(s);
    CheckOptions opt;
    opt.depth = 3;
    auto r = model_check(p, prop, opt);
    int bf = brute_force(p, prop, 3);
    REQUIRE(r.verified == (bf == 0));
    if (!r.verified) {
      ++counterexamples;
      REQUIRE(static_cast<int>(r.trace.size()) == bf);
    }
    opt.jobs = 4;
    auto rj = model_check(p, prop, opt);
    REQUIRE(rj.verified == r.verified);
    REQUIRE(rj.trace == r.trace);
  }
  CHECK(counterexamples > 0);
}
