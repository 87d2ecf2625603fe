#include "vigil/sm/interpreter.hpp"

#include "vigil/common/error.hpp"
#include "vigil/sm/normalize.hpp"

namespace vigil::sm {

SmInterpreter::SmInterpreter(const SmModel& model, int machine, ConstValues values)
    : model_(model), sm_(model.machines.at(static_cast<std::size_t>(machine))), values_(std::move(values)),
      clocks_(sm_.clocks.size(), 0) {}

bool SmInterpreter::holds(const Guard& g, const std::vector<bool>& inputs) const {
  for (const auto& a : g) {
    switch (a.kind) {
      case Atom::Kind::InputOn:
        if (!inputs.at(static_cast<std::size_t>(a.input))) return false;
        break;
      case Atom::Kind::InputOff:
        if (inputs.at(static_cast<std::size_t>(a.input))) return false;
        break;
      case Atom::Kind::Clock: {
        std::int64_t bound = evaluate(a.bound, values_);
        if (bound < 0 || bound > 0xFFFFFFFFll) {
          throw Error("E_CONST_RANGE", "clock bound " + std::to_string(bound) + " outside 0..2^32-1");
        }
        auto since = static_cast<std::uint32_t>(time_ - clocks_[static_cast<std::size_t>(a.clock)]);
        if (!kernel::compare(a.cmp, since, static_cast<std::uint32_t>(bound))) return false;
        break;
      }
    }
  }
  return true;
}

void SmInterpreter::perform(const std::vector<Action>& acts, std::vector<Invocation>& out) {
  for (const auto& a : acts) {
    if (a.kind == Action::Kind::ResetClock) {
      clocks_[static_cast<std::size_t>(a.clock)] = time_;
      continue;
    }
    for (const auto& prev : out) {
      if (prev.op == a.op) {
        throw Error("E_DOUBLE_INVOKE", "'" + model_.operations[static_cast<std::size_t>(a.op)].name + "' called twice in one cycle");
      }
    }
    Invocation inv{a.op, {}};
    for (const auto& e : a.args) inv.args.push_back(evaluate(e, values_));
    out.push_back(std::move(inv));
  }
}

void SmInterpreter::take(const Transition& first, const std::vector<bool>& inputs, std::vector<Invocation>& out) {
  const Transition* t = &first;
  for (std::size_t hops = 0;; ++hops) {
    if (hops > sm_.states.size()) throw Error("E_TIMELESS_LOOP", "machine '" + sm_.name + "' never reaches exec");
    perform(t->actions, out);
    state_ = t->dst;
    perform(sm_.states[static_cast<std::size_t>(state_)].entry, out);
    if (!is_timeless(sm_, state_)) return;
    const Transition* next = nullptr;
    for (const auto& u : sm_.transitions) {
      if (u.src == state_ && !u.exec && holds(u.guard, inputs)) {
        next = &u;
        break;
      }
    }
    if (!next) throw Error("E_NONTOTAL_TIMELESS", "no timeless transition of '" + sm_.states[static_cast<std::size_t>(state_)].name + "' holds");
    t = next;
  }
}

std::vector<Invocation> SmInterpreter::step(const std::vector<bool>& inputs) {
  std::vector<Invocation> out;
  int src = state_ < 0 ? kJunction : state_;
  for (const auto& t : sm_.transitions) {
    if (t.src != src || t.exec != (src != kJunction)) continue;
    if (holds(t.guard, inputs)) {
      take(t, inputs, out);
      break;
    }
  }
  time_ += sm_.cycle;
  return out;
}

kernel::OutputVector expected_outputs(const ResolvedPins& pins,
                                      const std::vector<Invocation>& calls, kernel::IoConfig io) {
  kernel::OutputVector out(static_cast<std::size_t>(io.outputs), kernel::kIoOff);
  for (const auto& c : calls) {
    auto k = static_cast<std::size_t>(c.op);
    out[static_cast<std::size_t>(pins.invoke[k] - 1)] = kernel::kIoOn;
    for (std::size_t p = 0; p < c.args.size(); ++p) {
      const auto& arg_pins = pins.arg[k][p];
      auto bits = encode_bits(c.args[p], static_cast<int>(arg_pins.size()));
      for (std::size_t b = 0; b < bits.size(); ++b) {
        out[static_cast<std::size_t>(arg_pins[b] - 1)] = bits[b] ? kernel::kIoOn : kernel::kIoOff;
      }
    }
  }
  return out;
}

}  // namespace vigil::sm
