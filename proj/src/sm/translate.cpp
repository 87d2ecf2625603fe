#include "vigil/sm/translate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "vigil/common/error.hpp"
#include "vigil/kernel/parser.hpp"
#include "vigil/kernel/validator.hpp"

namespace vigil::sm {

namespace {

void walk(const NormNode& n, const std::function<void(const NormNode&)>& fn) {
  fn(n);
  for (const auto& b : n.branches) walk(b.next, fn);
}

std::string clock_var(const CyclicStateMachine& m, int c) {
  return m.name + "_clk_" + m.clocks[static_cast<std::size_t>(c)];
}

class Emitter {
 public:
  Emitter(const SmModel& model, const ResolvedPins& pins, const ConstValues& values)
      : model_(model), pins_(pins), values_(values) {}

  void machine(const CyclicStateMachine& m, const NormalizedMachine& nm) {
    m_ = &m;
    line(1, "# machine " + m.name + ", " + std::to_string(nm.states.size()) + " normalized states");
    line(1, "run := 0");
    line(1, "if " + m.name + "_first = 1");
    line(2, m.name + "_first := 0");
    line(2, "run := 1");
    line(1, "else");
    line(2, "if since(" + last_var(m) + ") >= " + m.name + "_period");
    line(3, "run := 1");
    line(1, "if run = 1");
    line(2, last_var(m) + " := get_ms_tick()");
    std::set<int> ops;
    for (const auto& c : nm.cycles) {
      walk(c, [&](const NormNode& n) {
        for (const auto& a : n.actions) {
          if (a.kind == Action::Kind::Call) ops.insert(a.op);
        }
      });
    }
    for (int k : ops) {
      const auto& op = model_.operations[static_cast<std::size_t>(k)];
      line(2, invoke_var(op) + " := IO_OFF");
      for (std::size_t p = 0; p < op.params.size(); ++p) {
        for (std::size_t b = 0; b < pins_.arg[static_cast<std::size_t>(k)][p].size(); ++b) {
          line(2, arg_var(op, op.params[p], static_cast<int>(b)) + " := IO_OFF");
        }
      }
    }
    line(2, "cur := " + state_var(m));
    for (std::size_t k = 0; k < nm.cycles.size(); ++k) {
      line(2, "if cur = " + std::to_string(k) + "  # " + nm.states[k]);
      std::size_t before = out_.size();
      node(nm.cycles[k], nm, 3, 0);
      if (out_.size() == before) line(3, state_var(m) + " := " + std::to_string(k));
    }
    line(2, time_var(m) + " := add_u32(" + time_var(m) + ", " + std::to_string(m.cycle) + ")");
  }

  std::string take() { return std::move(out_); }
  int levels() const { return levels_; }
  bool uses_clock() const { return uses_clock_; }

 private:
  void line(int indent, const std::string& s) { out_ += std::string(static_cast<std::size_t>(indent) * 2, ' ') + s + "\n"; }

  void actions(const std::vector<Action>& acts, int indent) {
    for (const auto& a : acts) {
      if (a.kind == Action::Kind::ResetClock) {
        line(indent, clock_var(*m_, a.clock) + " := " + time_var(*m_));
        continue;
      }
      const auto& op = model_.operations[static_cast<std::size_t>(a.op)];
      line(indent, invoke_var(op) + " := IO_ON");
      for (std::size_t p = 0; p < op.params.size(); ++p) {
        std::int64_t v = evaluate(a.args[p], values_);
        const auto& pins = pins_.arg[static_cast<std::size_t>(a.op)][p];
        auto bits = encode_bits(v, static_cast<int>(pins.size()));
        for (std::size_t b = 0; b < bits.size(); ++b) {
          line(indent, arg_var(op, op.params[p], static_cast<int>(b)) + (bits[b] ? " := IO_ON" : " := IO_OFF"));
        }
      }
    }
  }

  // Opens one IF per atom; returns the indentation inside them.
  int guard(const Guard& g, int indent) {
    for (const auto& a : g) {
      switch (a.kind) {
        case Atom::Kind::InputOn:
          line(indent, "if " + input_var(model_.inputs[static_cast<std::size_t>(a.input)]) + " = IO_ON");
          break;
        case Atom::Kind::InputOff:
          line(indent, "if " + input_var(model_.inputs[static_cast<std::size_t>(a.input)]) + " != IO_ON");
          break;
        case Atom::Kind::Clock:
          uses_clock_ = true;
          line(indent, "el := sub_u32(" + time_var(*m_) + ", " + clock_var(*m_, a.clock) + ")");
          line(indent, "if el " + std::string(kernel::cmp_symbol(a.cmp)) + " " +
                           std::to_string(evaluate(a.bound, values_)));
          break;
      }
      ++indent;
    }
    return indent;
  }

  void node(const NormNode& n, const NormalizedMachine& nm, int indent, int level) {
    actions(n.actions, indent);
    if (n.branches.empty()) {
      if (n.dst >= 0) line(indent, state_var(*m_) + " := " + std::to_string(n.dst) + "  # " + nm.states[static_cast<std::size_t>(n.dst)]);
      return;
    }
    levels_ = std::max(levels_, level + 1);
    std::string sel = "s" + std::to_string(level);
    line(indent, sel + " := 0");
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      int in = guard(n.branches[i].guard, indent);
      line(in, "if " + sel + " = 0");
      line(in + 1, sel + " := " + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      line(indent, "if " + sel + " = " + std::to_string(i + 1));
      std::size_t before = out_.size();
      node(n.branches[i].next, nm, indent + 1, level + 1);
      if (out_.size() == before) line(indent + 1, sel + " := 0");  // nothing to do
    }
    // with no branch taken the machine stays where it is
  }

  const SmModel& model_;
  const ResolvedPins& pins_;
  const ConstValues& values_;
  const CyclicStateMachine* m_ = nullptr;
  std::string out_;
  int levels_ = 0;
  bool uses_clock_ = false;
};

void check_values(const SmModel& model, const NormalizedMachine& nm, const ConstValues& values) {
  for (const auto& c : nm.cycles) {
    walk(c, [&](const NormNode& n) {
      for (const auto& a : n.actions) {
        if (a.kind != Action::Kind::Call) continue;
        const auto& op = model.operations[static_cast<std::size_t>(a.op)];
        for (std::size_t p = 0; p < op.params.size(); ++p) {
          std::int64_t v = evaluate(a.args[p], values);
          if (!op.params[p].range.contains(v)) {
            throw Error("E_CONST_RANGE", "argument " + op.name + "." + op.params[p].name + " = " + std::to_string(v) +
                                             " outside " + std::to_string(op.params[p].range.lo) + ".." +
                                             std::to_string(op.params[p].range.hi));
          }
        }
      }
      for (const auto& b : n.branches) {
        for (const auto& atom : b.guard) {
          if (atom.kind != Atom::Kind::Clock) continue;
          std::int64_t v = evaluate(atom.bound, values);
          if (v < 0 || v > 0xFFFFFFFFll) {
            throw Error("E_CONST_RANGE", "clock bound " + std::to_string(v) + " outside 0..2^32-1");
          }
        }
      }
    });
  }
}

}  // namespace

std::string state_var(const CyclicStateMachine& m) { return m.name + "_state"; }
std::string time_var(const CyclicStateMachine& m) { return m.name + "_time"; }
std::string last_var(const CyclicStateMachine& m) { return m.name + "_last"; }

SmTranslation translate_sm(const SmModel& model, std::uint32_t cycle_unit_ms, const ConstValues& overrides,
                           const std::optional<PinMap>& pins, kernel::IoConfig io) {
  if (cycle_unit_ms == 0) throw Error("E_CONST_RANGE", "the cycle unit must be at least 1 ms");
  SmTranslation tr;
  tr.constants = resolve_constants(model, overrides);
  tr.pins = resolve_pins(model, pins ? *pins : default_pinmap(model), io);

  std::map<int, std::string> owner;
  for (const auto& m : model.machines) {
    tr.machines.push_back(normalize(model, m));
    check_values(model, tr.machines.back(), tr.constants);
    for (const auto& c : tr.machines.back().cycles) {
      walk(c, [&](const NormNode& n) {
        for (const auto& a : n.actions) {
          if (a.kind != Action::Kind::Call) continue;
          auto [it, fresh] = owner.emplace(a.op, m.name);
          if (!fresh && it->second != m.name) {
            throw Error("E_DOUBLE_INVOKE", "operation '" + model.operations[static_cast<std::size_t>(a.op)].name +
                                               "' is called by machines " + it->second + " and " + m.name);
          }
        }
      });
    }
    if (static_cast<std::uint64_t>(m.cycle) * cycle_unit_ms > 0xFFFFFFFFull) {
      throw Error("E_CONST_RANGE", "model cycle of '" + m.name + "' overflows 32-bit milliseconds");
    }
  }

  Emitter em(model, tr.pins, tr.constants);
  for (std::size_t i = 0; i < model.machines.size(); ++i) em.machine(model.machines[i], tr.machines[i]);
  std::string body = em.take();

  std::string& s = tr.source;
  s += "# model cycles driven by the board tick, cycle unit " + std::to_string(cycle_unit_ms) + " ms\n";
  s += "CONSTANTS\n";
  for (const auto& m : model.machines) {
    s += "  " + m.name + "_period : u32 = " + std::to_string(m.cycle * cycle_unit_ms) + "\n";
  }
  if (!model.inputs.empty()) {
    s += "INPUTS\n";
    for (std::size_t i = 0; i < model.inputs.size(); ++i) {
      s += "  " + input_var(model.inputs[i]) + " : io @ " + std::to_string(tr.pins.input[i]) + "\n";
    }
  }
  if (!model.operations.empty()) {
    s += "OUTPUTS\n";
    for (std::size_t k = 0; k < model.operations.size(); ++k) {
      const auto& op = model.operations[k];
      s += "  " + invoke_var(op) + " : io @ " + std::to_string(tr.pins.invoke[k]) + "\n";
      for (std::size_t p = 0; p < op.params.size(); ++p) {
        const auto& pp = tr.pins.arg[k][p];
        for (std::size_t b = 0; b < pp.size(); ++b) {
          s += "  " + arg_var(op, op.params[p], static_cast<int>(b)) + " : io @ " + std::to_string(pp[b]) + "\n";
        }
      }
    }
  }
  std::size_t most_states = 1;
  for (const auto& nm : tr.machines) most_states = std::max(most_states, nm.states.size());
  const std::string state_type = most_states > 255 ? "u16" : "u8";
  s += "STATE\n";
  for (std::size_t i = 0; i < model.machines.size(); ++i) {
    const auto& m = model.machines[i];
    s += "  " + state_var(m) + " : " + state_type + " = 0\n";
    s += "  " + m.name + "_first : u8 = 1\n";
    s += "  " + last_var(m) + " : u32 = 0\n";
    s += "  " + time_var(m) + " : u32 = 0\n";
    for (std::size_t c = 0; c < m.clocks.size(); ++c) s += "  " + clock_var(m, static_cast<int>(c)) + " : u32 = 0\n";
  }
  s += "LOGIC\n";
  s += "  local run : u8\n";
  s += "  local cur : " + state_type + "\n";
  if (em.uses_clock()) s += "  local el : u32\n";
  for (int l = 0; l < em.levels(); ++l) s += "  local s" + std::to_string(l) + " : u16\n";
  s += body;

  tr.program = kernel::prepare(kernel::parse_program(s, io));
  return tr;
}

}  // namespace vigil::sm
