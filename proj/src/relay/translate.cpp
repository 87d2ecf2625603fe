#include "vigil/relay/translate.hpp"

#include "vigil/common/error.hpp"
#include "vigil/kernel/parser.hpp"
#include "vigil/kernel/validator.hpp"
#include "vigil/relay/settle.hpp"

namespace vigil::relay {

namespace {

void extend(const Netlist& n, Path& cur, const Terminal& at, std::vector<Path>& out) {
  for (std::size_t i = 0; i < n.strands.size(); ++i) {
    const auto& s = n.strands[i];
    if (!(s.from == at)) continue;
    Path next = cur;
    next.strands.push_back(static_cast<int>(i));
    for (const auto& e : s.elements) {
      std::uint32_t bit = 1u << e.relay;
      switch (e.kind) {
        case ContactKind::NormallyOpen: next.no_mask |= bit; break;
        case ContactKind::NormallyClosed: next.nc_mask |= bit; break;
        case ContactKind::Coil: next.coil_mask |= bit; break;
      }
    }
    if (s.to.kind == TerminalKind::Junction) {
      extend(n, next, s.to, out);
    } else {
      next.output = s.to.kind == TerminalKind::Output ? s.to.index : -1;
      out.push_back(std::move(next));
      if (out.size() > kMaxPaths) {
        throw Error("E_PATH_EXPLOSION", "more than " + std::to_string(kMaxPaths) + " source-to-sink paths");
      }
    }
  }
}

std::string mask_type(std::size_t relays) { return relays <= 8 ? "u8" : relays <= 16 ? "u16" : "u32"; }

}  // namespace

std::vector<Path> elaborate(const Netlist& n) {
  if (n.relays.size() > 32) throw Error("E_TOO_MANY_IO", "at most 32 relays are supported");
  std::vector<Path> out;
  Path start;
  extend(n, start, Terminal{TerminalKind::Positive, -1}, out);
  for (std::size_t i = 0; i < n.inputs.size(); ++i) {
    Path p;
    p.input = static_cast<int>(i);
    extend(n, p, Terminal{TerminalKind::Input, static_cast<int>(i)}, out);
  }
  return out;
}

RelayTranslation translate_relay(const Netlist& n, int max_iter, kernel::IoConfig io) {
  if (n.relays.size() > 32) throw Error("E_TOO_MANY_IO", std::to_string(n.relays.size()) + " relays; at most 32 fit");
  if (static_cast<int>(n.inputs.size()) > io.inputs) {
    throw Error("E_TOO_MANY_IO", std::to_string(n.inputs.size()) + " inputs; the board has " + std::to_string(io.inputs));
  }
  if (static_cast<int>(n.outputs.size()) > io.outputs) {
    throw Error("E_TOO_MANY_IO",
                std::to_string(n.outputs.size()) + " outputs; the board has " + std::to_string(io.outputs));
  }
  RelayTranslation tr;
  tr.max_iter = max_iter > 0 ? max_iter : default_max_iter(n);
  auto paths = elaborate(n);

  std::string& s = tr.source;
  s += "# settles the relay circuit once per cycle, " + std::to_string(tr.max_iter) + " passes at most\n";
  if (!n.inputs.empty()) {
    s += "INPUTS\n";
    for (const auto& x : n.inputs) s += "  i_" + x + " : io\n";
  }
  if (!n.outputs.empty()) {
    s += "OUTPUTS\n";
    for (const auto& y : n.outputs) s += "  o_" + y + " : io\n";
  }
  if (!n.relays.empty()) {
    s += "STATE\n";
    for (const auto& r : n.relays) s += "  r_" + r + " : io = IO_OFF\n";
  }
  const std::string mt = mask_type(n.relays.size());
  s += "LOGIC\n";
  s += "  local act : " + mt + "\n";
  s += "  local nxt : " + mt + "\n";
  s += "  local t : " + mt + "\n";
  s += "  local done : u8\n";
  s += "  act := 0\n";
  s += "  done := 0\n";
  for (std::size_t r = 0; r < n.relays.size(); ++r) {
    s += "  if r_" + n.relays[r] + " = IO_ON\n";
    s += "    act := act | " + std::to_string(1u << r) + "\n";
  }

  // Emits the nested conditions of a path at `depth`; returns the new depth.
  auto guard = [&](const Path& p, int depth) {
    auto pad = [&]() { return std::string(static_cast<std::size_t>(depth) * 2, ' '); };
    if (p.input >= 0) {
      s += pad() + "if i_" + n.inputs[static_cast<std::size_t>(p.input)] + " = IO_ON\n";
      ++depth;
    }
    if (p.no_mask) {
      s += pad() + "t := act & " + std::to_string(p.no_mask) + "\n";
      s += pad() + "if t = " + std::to_string(p.no_mask) + "\n";
      ++depth;
    }
    if (p.nc_mask) {
      s += pad() + "t := act & " + std::to_string(p.nc_mask) + "\n";
      s += pad() + "if t = 0\n";
      ++depth;
    }
    return depth;
  };

  for (int pass = 0; pass < tr.max_iter; ++pass) {
    s += "  if done = 0\n";
    s += "    nxt := 0\n";
    for (const auto& p : paths) {
      if (!p.coil_mask || (p.no_mask & p.nc_mask)) continue;
      int d = guard(p, 2);
      s += std::string(static_cast<std::size_t>(d) * 2, ' ') + "nxt := nxt | " + std::to_string(p.coil_mask) + "\n";
    }
    s += "    if nxt = act\n";
    s += "      done := 1\n";
    s += "    else\n";
    s += "      act := nxt\n";
  }

  s += "  if done = 1\n";
  for (std::size_t r = 0; r < n.relays.size(); ++r) {
    auto bit = std::to_string(1u << r);
    s += "    t := act & " + bit + "\n";
    s += "    if t = " + bit + "\n";
    s += "      r_" + n.relays[r] + " := IO_ON\n";
    s += "    else\n";
    s += "      r_" + n.relays[r] + " := IO_OFF\n";
  }
  for (std::size_t y = 0; y < n.outputs.size(); ++y) {
    s += "    o_" + n.outputs[y] + " := IO_OFF\n";
    for (const auto& p : paths) {
      if (p.output != static_cast<int>(y) || (p.no_mask & p.nc_mask)) continue;
      int d = guard(p, 2);
      s += std::string(static_cast<std::size_t>(d) * 2, ' ') + "o_" + n.outputs[y] + " := IO_ON\n";
    }
  }
  if (!n.outputs.empty()) {
    s += "  else\n";
    s += "    # no fixed point: an invalid code forces the board into panic\n";
    for (const auto& y : n.outputs) s += "    o_" + y + " := 0\n";
  }

  tr.program = kernel::prepare(kernel::parse_program(s, io));

  if (n.inputs.size() <= 16) {
    RelayState none(n.relays.size(), false);
    for (std::uint32_t v = 0; v < (1u << n.inputs.size()); ++v) {
      InputState in(n.inputs.size());
      for (std::size_t i = 0; i < in.size(); ++i) in[i] = (v >> i) & 1u;
      if (!settle(n, in, none, tr.max_iter).fixed_point) {
        tr.oscillating_inputs = in;
        break;
      }
    }
  }
  return tr;
}

}  // namespace vigil::relay
