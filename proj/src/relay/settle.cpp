#include "vigil/relay/settle.hpp"

#include <algorithm>

namespace vigil::relay {

namespace {

// Node numbering: 0 = P+, 1 = N-, then inputs, outputs, junctions.
struct Nodes {
  explicit Nodes(const Netlist& n)
      : in0(2), out0(in0 + static_cast<int>(n.inputs.size())), j0(out0 + static_cast<int>(n.outputs.size())),
        count(j0 + static_cast<int>(n.junctions.size())) {}

  int of(const Terminal& t) const {
    switch (t.kind) {
      case TerminalKind::Positive: return 0;
      case TerminalKind::Negative: return 1;
      case TerminalKind::Input: return in0 + t.index;
      case TerminalKind::Output: return out0 + t.index;
      case TerminalKind::Junction: return j0 + t.index;
    }
    return 0;
  }

  int in0, out0, j0, count;
};

bool closed(const Strand& s, const RelayState& active) {
  for (const auto& e : s.elements) {
    bool on = active[static_cast<std::size_t>(e.relay)];
    if (e.kind == ContactKind::NormallyOpen && !on) return false;
    if (e.kind == ContactKind::NormallyClosed && on) return false;
  }
  return true;
}

struct Reach {
  std::vector<bool> from_source;
  std::vector<bool> to_sink;
  std::vector<bool> strand_closed;
};

Reach reach(const Netlist& n, const InputState& inputs, const RelayState& active) {
  Nodes nodes(n);
  Reach r;
  r.from_source.assign(static_cast<std::size_t>(nodes.count), false);
  r.to_sink.assign(static_cast<std::size_t>(nodes.count), false);
  r.strand_closed.resize(n.strands.size());
  for (std::size_t i = 0; i < n.strands.size(); ++i) r.strand_closed[i] = closed(n.strands[i], active);

  r.from_source[0] = true;
  for (std::size_t i = 0; i < n.inputs.size(); ++i) r.from_source[static_cast<std::size_t>(nodes.in0) + i] = inputs[i];
  r.to_sink[1] = true;
  for (std::size_t o = 0; o < n.outputs.size(); ++o) r.to_sink[static_cast<std::size_t>(nodes.out0) + o] = true;

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n.strands.size(); ++i) {
      if (!r.strand_closed[i]) continue;
      auto a = static_cast<std::size_t>(nodes.of(n.strands[i].from));
      auto b = static_cast<std::size_t>(nodes.of(n.strands[i].to));
      if (r.from_source[a] && !r.from_source[b]) r.from_source[b] = changed = true;
      if (r.to_sink[b] && !r.to_sink[a]) r.to_sink[a] = changed = true;
    }
  }
  return r;
}

}  // namespace

int default_max_iter(const Netlist& n) {
  std::size_t r = n.relays.size();
  if (r >= 9) return 1024;
  return std::min(1024, 2 << r);
}

RelayState next_relays(const Netlist& n, const InputState& inputs, const RelayState& active) {
  Nodes nodes(n);
  Reach r = reach(n, inputs, active);
  RelayState next(n.relays.size(), false);
  for (std::size_t i = 0; i < n.strands.size(); ++i) {
    const auto& s = n.strands[i];
    if (!r.strand_closed[i] || !r.from_source[static_cast<std::size_t>(nodes.of(s.from))] ||
        !r.to_sink[static_cast<std::size_t>(nodes.of(s.to))]) {
      continue;
    }
    for (const auto& e : s.elements) {
      if (e.kind == ContactKind::Coil) next[static_cast<std::size_t>(e.relay)] = true;
    }
  }
  return next;
}

std::vector<bool> output_states(const Netlist& n, const InputState& inputs, const RelayState& active) {
  Nodes nodes(n);
  Reach r = reach(n, inputs, active);
  std::vector<bool> out(n.outputs.size());
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = r.from_source[static_cast<std::size_t>(nodes.out0) + o];
  return out;
}

SettleResult settle(const Netlist& n, const InputState& inputs, const RelayState& prev, int max_iter) {
  SettleResult res;
  RelayState cur = prev;
  for (int i = 1; i <= max_iter; ++i) {
    RelayState next = next_relays(n, inputs, cur);
    res.iterations = i;
    if (next == cur) {
      res.fixed_point = true;
      break;
    }
    cur = std::move(next);
  }
  res.relays = cur;
  res.outputs = output_states(n, inputs, cur);
  return res;
}

}  // namespace vigil::relay
