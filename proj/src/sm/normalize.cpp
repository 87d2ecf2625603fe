#include "vigil/sm/normalize.hpp"

#include <deque>
#include <set>

#include "vigil/common/error.hpp"

namespace vigil::sm {

namespace {

std::vector<const Transition*> outgoing(const CyclicStateMachine& sm, int node) {
  std::vector<const Transition*> out;
  for (const auto& t : sm.transitions) {
    if (t.src == node) out.push_back(&t);
  }
  return out;
}

std::string node_name(const CyclicStateMachine& sm, int node) {
  return node == kJunction ? "initial" : sm.states[static_cast<std::size_t>(node)].name;
}

void check_structure(const CyclicStateMachine& sm) {
  // timeless transitions must not close a loop
  std::vector<int> mark(sm.states.size(), 0);
  auto visit = [&](auto&& self, int s) -> void {
    mark[static_cast<std::size_t>(s)] = 1;
    for (const auto* t : outgoing(sm, s)) {
      if (t->exec) continue;
      int d = t->dst;
      if (mark[static_cast<std::size_t>(d)] == 1) {
        throw Error("E_TIMELESS_LOOP", "states '" + sm.states[static_cast<std::size_t>(d)].name +
                                           "' and onwards form a loop without exec in machine '" + sm.name + "'");
      }
      if (mark[static_cast<std::size_t>(d)] == 0) self(self, d);
    }
    mark[static_cast<std::size_t>(s)] = 2;
  };
  for (std::size_t s = 0; s < sm.states.size(); ++s) {
    if (mark[s] == 0) visit(visit, static_cast<int>(s));
  }

  for (int node = kJunction; node < static_cast<int>(sm.states.size()); ++node) {
    auto out = outgoing(sm, node);
    bool timeless = false, waits = false, total = false;
    for (const auto* t : out) {
      (t->exec ? waits : timeless) = true;
      if (!t->exec && t->guard.empty()) total = true;
    }
    if (timeless && waits) {
      throw Error("E_NONTOTAL_TIMELESS",
                  "state '" + node_name(sm, node) + "' mixes exec and timeless transitions (line " +
                      std::to_string(out.front()->line) + ")");
    }
    if (timeless && !total) {
      throw Error("E_NONTOTAL_TIMELESS", "timeless transitions of '" + node_name(sm, node) +
                                             "' need an unguarded fallback so that the cycle always ends in a state");
    }
  }
}

class Normalizer {
 public:
  Normalizer(const SmModel& model, const CyclicStateMachine& sm) : model_(model), sm_(sm) {}

  NormalizedMachine run() {
    check_structure(sm_);
    nm_.name = sm_.name;
    nm_.cycle = sm_.cycle;
    nm_.clocks = sm_.clocks;
    nm_.states.push_back("INIT");
    nm_.origin.push_back(-1);
    nm_.cycles.emplace_back();
    nm_.waits_in.push_back("");
    auto init = branches(kJunction, {});  // total, so no fallback
    nm_.cycles[0].branches = std::move(init);
    while (!queue_.empty()) {
      int k = queue_.front();
      queue_.pop_front();
      int s = nm_.origin[static_cast<std::size_t>(k)];
      NormNode node;
      node.branches = branches(s, {});
      node.dst = k;  // no exec transition enabled: wait here
      nm_.cycles[static_cast<std::size_t>(k)] = std::move(node);
    }
    return std::move(nm_);
  }

 private:
  int waiting(int s) {
    for (std::size_t k = 1; k < nm_.origin.size(); ++k) {
      if (nm_.origin[k] == s) return static_cast<int>(k);
    }
    nm_.states.push_back("EXEC_" + std::to_string(nm_.states.size()));
    nm_.origin.push_back(s);
    nm_.waits_in.push_back(sm_.states[static_cast<std::size_t>(s)].name);
    nm_.cycles.emplace_back();
    int k = static_cast<int>(nm_.states.size()) - 1;
    queue_.push_back(k);
    return k;
  }

  std::vector<NormBranch> branches(int node, const std::set<int>& called) {
    std::vector<NormBranch> out;
    for (const auto* t : outgoing(sm_, node)) out.push_back({t->guard, enter(*t, called)});
    return out;
  }

  NormNode enter(const Transition& t, std::set<int> called) {
    NormNode n;
    n.actions = t.actions;
    const auto& entry = sm_.states[static_cast<std::size_t>(t.dst)].entry;
    n.actions.insert(n.actions.end(), entry.begin(), entry.end());
    for (const auto& a : n.actions) {
      if (a.kind != Action::Kind::Call) continue;
      if (!called.insert(a.op).second) {
        throw Error("E_DOUBLE_INVOKE", "operation '" + model_.operations[static_cast<std::size_t>(a.op)].name +
                                           "' called twice within one model cycle (line " + std::to_string(t.line) +
                                           ")");
      }
    }
    if (is_timeless(sm_, t.dst)) {
      n.branches = branches(t.dst, called);
    } else {
      n.dst = waiting(t.dst);
    }
    return n;
  }

  const SmModel& model_;
  const CyclicStateMachine& sm_;
  NormalizedMachine nm_;
  std::deque<int> queue_;
};

std::string format_value(const ValueExpr& e) {
  switch (e.kind) {
    case ValueExpr::Kind::Literal: return std::to_string(e.literal);
    case ValueExpr::Kind::Constant: return e.name;
    case ValueExpr::Kind::Binary:
      return "(" + format_value(e.args[0]) + " " + e.op + " " + format_value(e.args[1]) + ")";
  }
  return "?";
}

std::string format_guard(const SmModel& model, const NormalizedMachine& nm, const Guard& g) {
  if (g.empty()) return "true";
  std::string out;
  for (const auto& a : g) {
    if (!out.empty()) out += " and ";
    switch (a.kind) {
      case Atom::Kind::InputOn: out += "$" + model.inputs[static_cast<std::size_t>(a.input)].name; break;
      case Atom::Kind::InputOff: out += "!$" + model.inputs[static_cast<std::size_t>(a.input)].name; break;
      case Atom::Kind::Clock:
        out += "since(" + nm.clocks[static_cast<std::size_t>(a.clock)] + ") " +
               std::string(kernel::cmp_symbol(a.cmp)) + " " + format_value(a.bound);
        break;
    }
  }
  return out;
}

std::string format_actions(const SmModel& model, const NormalizedMachine& nm, const std::vector<Action>& acts) {
  std::string out;
  for (const auto& a : acts) {
    if (!out.empty()) out += "; ";
    if (a.kind == Action::Kind::ResetClock) {
      out += "#" + nm.clocks[static_cast<std::size_t>(a.clock)];
      continue;
    }
    out += "$" + model.operations[static_cast<std::size_t>(a.op)].name + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? ", " : "") + format_value(a.args[i]);
    out += ")";
  }
  return out;
}

void format_node(const SmModel& model, const NormalizedMachine& nm, const NormNode& n, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (!n.actions.empty()) out += pad + "/ " + format_actions(model, nm, n.actions) + "\n";
  for (const auto& b : n.branches) {
    out += pad + "[" + format_guard(model, nm, b.guard) + "]\n";
    format_node(model, nm, b.next, depth + 1, out);
  }
  if (n.dst >= 0) out += pad + (n.branches.empty() ? "-> " : "otherwise -> ") + nm.states[static_cast<std::size_t>(n.dst)] + "\n";
}

}  // namespace

bool is_timeless(const CyclicStateMachine& sm, int state) {
  for (const auto& t : sm.transitions) {
    if (t.src == state && !t.exec) return true;
  }
  return false;
}

NormalizedMachine normalize(const SmModel& model, const CyclicStateMachine& sm) { return Normalizer(model, sm).run(); }

std::string format_normalized(const SmModel& model, const NormalizedMachine& nm) {
  std::string out = "machine " + nm.name + ": " + std::to_string(nm.states.size()) + " states\n";
  for (std::size_t k = 0; k < nm.states.size(); ++k) {
    out += nm.states[k];
    if (!nm.waits_in[k].empty()) out += " (waiting in " + nm.waits_in[k] + ")";
    out += "\n";
    format_node(model, nm, nm.cycles[k], 1, out);
  }
  return out;
}

}  // namespace vigil::sm
