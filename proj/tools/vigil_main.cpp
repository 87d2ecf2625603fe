// vigil: validate, compile, link, simulate and model-check cyclic programs.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "vigil/checker/checker.hpp"
#include "vigil/codegen/bytecode_a.hpp"
#include "vigil/codegen/bytecode_b.hpp"
#include "vigil/codegen/image.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/kernel/parser.hpp"
#include "vigil/kernel/validator.hpp"
#include "vigil/relay/netlist.hpp"
#include "vigil/relay/translate.hpp"
#include "vigil/sm/normalize.hpp"
#include "vigil/sm/translate.hpp"
#include "vigil/vm/scenario.hpp"

namespace fs = std::filesystem;
using namespace vigil;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFailure = 2;  // panic in sim, counterexample in modelcheck

struct Globals {
  int io_inputs = 20;
  int io_outputs = 8;
  std::uint32_t cycle_ms = 5;
  std::string trace_format = "text";
  int jobs = 1;
  bool verbose = false;

  kernel::IoConfig io() const { return {io_inputs, io_outputs}; }
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    text::write_file(path, text);
  }
}

kernel::CyclicProgram load_program(const std::string& path, const Globals& g) {
  return kernel::prepare(kernel::parse_program(text::read_file(path), g.io()));
}

// Test hook: renames one variable in the program handed to the second compiler.
void rename_in(kernel::Expr& e, const std::string& from, const std::string& to) {
  if (e.kind == kernel::ExprKind::Var && e.name == from) e.name = to;
  for (auto& a : e.args) rename_in(a, from, to);
}

void rename_in(std::vector<kernel::Stmt>& body, const std::string& from, const std::string& to) {
  for (auto& s : body) {
    if (s.target == from) s.target = to;
    rename_in(s.value, from, to);
    rename_in(s.cond, from, to);
    rename_in(s.then_body, from, to);
    rename_in(s.else_body, from, to);
  }
}

kernel::CyclicProgram renamed(kernel::CyclicProgram p, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) throw Error("E_USAGE", "--rename-b expects OLD=NEW");
  std::string from = spec.substr(0, eq), to = spec.substr(eq + 1);
  int i = p.find(from);
  if (i < 0) throw Error("E_USAGE", "--rename-b: no variable '" + from + "'");
  p.decls[static_cast<std::size_t>(i)].name = to;
  rename_in(p.init, from, to);
  rename_in(p.logic, from, to);
  return p;
}

int cmd_check(const Globals& g, const std::string& src) {
  auto program = kernel::parse_program(text::read_file(src), g.io());
  auto report = kernel::validate(program);
  if (!report.ok()) {
    std::cerr << report.to_string();
    return kExitError;
  }
  std::cout << src << ": ok\n";
  return kExitOk;
}

struct BuildOptions {
  std::string src, out, layout, hex, rename_b, b_from;
  bool listing = false;
};

int cmd_build(const Globals& g, const BuildOptions& o) {
  auto program = load_program(o.src, g);
  auto a = codegen::compile_a(program);
  auto program_b = o.b_from.empty() ? program : load_program(o.b_from, g);
  auto b = codegen::compile_b(o.rename_b.empty() ? program_b : renamed(program_b, o.rename_b));
  codegen::MemoryLayout layout;
  if (!o.layout.empty()) layout = codegen::parse_layout(text::read_file(o.layout));
  auto image = codegen::link(a, b, g.io(), layout);
  auto bytes = codegen::serialize(image);
  std::string out = o.out.empty() ? fs::path(o.src).replace_extension(".cspimg").string() : o.out;
  text::write_file(out, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  if (o.listing) {
    text::write_file(out + ".a.lst", codegen::listing_a(a));
    text::write_file(out + ".b.lst", codegen::listing_b(b));
  }
  if (!o.hex.empty()) text::write_file(o.hex, codegen::intel_hex(image));
  std::cout << out << ": " << bytes.size() << " bytes, code A " << a.code.size() << " B " << b.code.size()
            << ", data " << a.layout.size << "\n";
  return kExitOk;
}

struct SimOptions {
  std::string image, scenario, out;
  int settle_delay = 2;
};

int cmd_sim(const Globals& g, const SimOptions& o) {
  std::string raw = text::read_file(o.image);
  auto image = codegen::deserialize(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
  auto scenario = vm::parse_scenario(text::read_file(o.scenario));
  vm::BoardConfig cfg;
  cfg.cycle_ms = g.cycle_ms;
  cfg.settle_delay = o.settle_delay;
  auto trace = vm::run_scenario(std::move(image), scenario, cfg);
  write_or_print(o.out, g.trace_format == "json" ? vm::format_trace_json(trace) + "\n" : vm::format_trace_text(trace));
  return trace.panicked ? kExitFailure : kExitOk;
}

int cmd_translate_relay(const Globals& g, const std::string& src, const std::string& out, int max_iter) {
  auto netlist = relay::parse_netlist(text::read_file(src));
  auto tr = relay::translate_relay(netlist, max_iter, g.io());
  if (tr.oscillating_inputs) {
    std::string v;
    for (std::size_t i = 0; i < netlist.inputs.size(); ++i) {
      v += (i ? " " : "") + netlist.inputs[i] + "=" + ((*tr.oscillating_inputs)[i] ? "ON" : "OFF");
    }
    std::cerr << "warning: circuit does not settle within " << tr.max_iter << " iterations for inputs [" << v
              << "]; the program drives invalid output codes there and the board will panic\n";
  }
  write_or_print(out, tr.source);
  return kExitOk;
}

struct SmOptions {
  std::string src, out, pinmap;
  std::uint32_t cycle_unit = 100;
  std::vector<std::string> consts;
  bool show_normalized = false;
};

int cmd_translate_sm(const Globals& g, const SmOptions& o) {
  auto model = sm::parse_csm(text::read_file(o.src));
  sm::ConstValues values;
  for (const auto& c : o.consts) {
    auto eq = c.find('=');
    auto v = eq == std::string::npos ? std::nullopt : text::parse_int(c.substr(eq + 1));
    if (!v) throw Error("E_USAGE", "--const expects NAME=INTEGER, got '" + c + "'");
    values[c.substr(0, eq)] = *v;
  }
  std::optional<sm::PinMap> pins;
  if (!o.pinmap.empty()) pins = sm::parse_pinmap(text::read_file(o.pinmap));
  auto tr = sm::translate_sm(model, o.cycle_unit, values, pins, g.io());
  if (o.show_normalized) {
    for (const auto& nm : tr.machines) std::cerr << sm::format_normalized(model, nm);
  }
  write_or_print(o.out, tr.source);
  return kExitOk;
}

struct CheckOptions {
  std::string src, props, cex_dir = ".";
  int depth = 32;
  std::uint64_t max_states = checker::kDefaultMaxStates;
};

int cmd_modelcheck(const Globals& g, const CheckOptions& o) {
  auto program = load_program(o.src, g);
  auto props = checker::parse_properties(text::read_file(o.props));
  checker::CheckOptions opt;
  opt.depth = o.depth;
  opt.max_states = o.max_states;

  // One job per property; verdicts are reported in file order.
  std::vector<std::optional<checker::CheckResult>> results(props.size());
  std::vector<std::exception_ptr> errors(props.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < props.size();) {
      try {
        results[i] = checker::model_check(program, props[i], opt);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(g.jobs, static_cast<int>(props.size())); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool all = true;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    const auto& p = props[i];
    const auto& r = *results[i];
    if (r.verified) {
      std::cout << "VERIFIED " << p.name << " depth=" << r.depth << " states=" << r.states_explored
                << (r.exhaustive ? " (all reachable states)" : "") << "\n";
      continue;
    }
    all = false;
    fs::create_directories(o.cex_dir);
    std::string path = (fs::path(o.cex_dir) / (p.name + ".scn")).string();
    text::write_file(path, checker::counterexample_scenario(program, p, r));
    std::cout << "COUNTEREXAMPLE " << p.name << " length=" << r.trace.size() << " states=" << r.states_explored
              << " -> " << path << "\n";
  }
  return all ? kExitOk : kExitFailure;
}

void report(const Error& e) {
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    for (const auto& d : pe->diagnostics()) std::cerr << "error: " << format_diagnostic(d) << "\n";
    return;
  }
  if (auto* vf = dynamic_cast<const kernel::ValidationFailure*>(&e)) {
    std::cerr << vf->report().to_string();
    return;
  }
  std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolchain for a double-channel safety controller"};
  app.set_config("--config", "", "key = value file with defaults; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--io-inputs", g.io_inputs, "Input pins on the board")->check(CLI::Range(1, 32));
  app.add_option("--io-outputs", g.io_outputs, "Output pins on the board")->check(CLI::Range(1, 32));
  app.add_option("--cycle-ms", g.cycle_ms, "Board cycle period in milliseconds");
  app.add_option("--trace-format", g.trace_format, "Simulation trace format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--jobs", g.jobs, "Properties checked in parallel")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose);

  std::string check_src;
  auto* check = app.add_subcommand("check", "Validate a kernel program");
  check->add_option("source", check_src)->required();

  BuildOptions build_opt;
  auto* build = app.add_subcommand("build", "Compile both binaries and link an image");
  build->add_option("source", build_opt.src)->required();
  build->add_option("-o,--output", build_opt.out, "Image path (default: source with .cspimg)");
  build->add_option("--layout", build_opt.layout, "Segment base addresses");
  build->add_option("--hex", build_opt.hex, "Also write Intel HEX");
  build->add_flag("--emit-listing", build_opt.listing, "Write <image>.a.lst and <image>.b.lst");
  build->add_option("--rename-b", build_opt.rename_b, "OLD=NEW: rename a variable for binary B only (test hook)");
  build->add_option("--b-from", build_opt.b_from, "Compile binary B from another source (test hook)");

  SimOptions sim_opt;
  auto* sim = app.add_subcommand("sim", "Run a scenario on the simulated board");
  sim->add_option("image", sim_opt.image)->required();
  sim->add_option("scenario", sim_opt.scenario)->required();
  sim->add_option("-o,--output", sim_opt.out, "Trace path (default: stdout)");
  sim->add_option("--settle-delay", sim_opt.settle_delay, "Cycles before output readback");

  std::string relay_src, relay_out;
  int relay_iter = 0;
  auto* trelay = app.add_subcommand("translate-relay", "Translate a relay netlist to a kernel program");
  trelay->add_option("netlist", relay_src)->required();
  trelay->add_option("-o,--output", relay_out);
  trelay->add_option("--max-iter", relay_iter, "Settling passes (default: min(2*2^relays, 1024))");

  SmOptions sm_opt;
  auto* tsm = app.add_subcommand("translate-sm", "Translate a cyclic state machine to a kernel program");
  tsm->add_option("machine", sm_opt.src)->required();
  tsm->add_option("-o,--output", sm_opt.out);
  tsm->add_option("--cycle-unit", sm_opt.cycle_unit, "Milliseconds per model time unit")->check(CLI::PositiveNumber);
  tsm->add_option("--const", sm_opt.consts, "NAME=VALUE, repeatable");
  tsm->add_option("--pinmap", sm_opt.pinmap);
  tsm->add_flag("--show-normalized", sm_opt.show_normalized, "Print the normalized machines to stderr");

  CheckOptions mc_opt;
  auto* mc = app.add_subcommand("modelcheck", "Check safety properties by exhaustive exploration");
  mc->add_option("source", mc_opt.src)->required();
  mc->add_option("properties", mc_opt.props)->required();
  mc->add_option("--depth", mc_opt.depth, "Cycles to explore")->check(CLI::PositiveNumber);
  mc->add_option("--max-states", mc_opt.max_states, "Cap on explored (state, input) pairs");
  mc->add_option("--cex-dir", mc_opt.cex_dir, "Where counterexample scenarios go");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(g, check_src);
    if (*build) return cmd_build(g, build_opt);
    if (*sim) return cmd_sim(g, sim_opt);
    if (*trelay) return cmd_translate_relay(g, relay_src, relay_out, relay_iter);
    if (*tsm) return cmd_translate_sm(g, sm_opt);
    if (*mc) return cmd_modelcheck(g, mc_opt);
  } catch (const Error& e) {
    report(e);
    return kExitError;
  }
  return kExitError;
}
