#include "vigil/sm/pinmap.hpp"

#include <map>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::sm {

namespace {

int pin_number(const std::string& s) {
  auto v = text::parse_uint(s);
  if (!v || *v == 0 || *v > 1000) throw Error("E_SYNTAX", "bad pin number '" + s + "'");
  return static_cast<int>(*v);
}

}  // namespace

PinMap parse_pinmap(std::string_view src) {
  PinMap pm;
  std::vector<Diagnostic> diags;
  int number = 0;
  for (const auto& raw : text::lines(src)) {
    ++number;
    auto w = text::words(std::string_view(raw).substr(0, raw.find('#')));
    if (w.empty()) continue;
    try {
      if (w[0] == "in" && w.size() == 4 && w[2] == "pin") {
        pm.inputs.emplace_back(w[1], pin_number(w[3]));
      } else if (w[0] == "out" && w.size() >= 5 && w[2] == "invoke" && w[3] == "pin") {
        OutputPins o{w[1], pin_number(w[4]), {}};
        std::size_t i = 5;
        if (i < w.size()) {
          if (w[i] != "args") throw Error("E_SYNTAX", "expected 'args' after the invoke pin");
          if (++i == w.size()) throw Error("E_SYNTAX", "'args' needs at least one name:first-last");
          for (; i < w.size(); ++i) {
            auto colon = w[i].find(':');
            auto dash = w[i].find('-', colon == std::string::npos ? 0 : colon);
            if (colon == std::string::npos || dash == std::string::npos) {
              throw Error("E_SYNTAX", "expected name:first-last, found '" + w[i] + "'");
            }
            ArgPins a{w[i].substr(0, colon), pin_number(w[i].substr(colon + 1, dash - colon - 1)),
                      pin_number(w[i].substr(dash + 1))};
            if (a.last < a.first) throw Error("E_SYNTAX", "pin range " + w[i] + " runs backwards");
            o.args.push_back(std::move(a));
          }
        }
        pm.outputs.push_back(std::move(o));
      } else {
        throw Error("E_SYNTAX", "expected 'in NAME pin N' or 'out NAME invoke pin N [args P:a-b ...]'");
      }
    } catch (const Error& e) {
      diags.push_back({e.code(), number, 1, e.what()});
    }
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return pm;
}

std::string format_pinmap(const PinMap& pm) {
  std::string out;
  for (const auto& [name, pin] : pm.inputs) out += "in " + name + " pin " + std::to_string(pin) + "\n";
  for (const auto& o : pm.outputs) {
    out += "out " + o.op + " invoke pin " + std::to_string(o.invoke);
    if (!o.args.empty()) {
      out += " args";
      for (const auto& a : o.args) out += " " + a.param + ":" + std::to_string(a.first) + "-" + std::to_string(a.last);
    }
    out += "\n";
  }
  return out;
}

PinMap default_pinmap(const SmModel& model) {
  PinMap pm;
  int pin = 1;
  for (const auto& in : model.inputs) pm.inputs.emplace_back(in.name, pin++);
  pin = 1;
  for (const auto& op : model.operations) {
    OutputPins o{op.name, pin++, {}};
    for (const auto& p : op.params) {
      int bits = bits_for(p.range);
      o.args.push_back({p.name, pin, pin + bits - 1});
      pin += bits;
    }
    pm.outputs.push_back(std::move(o));
  }
  return pm;
}

ResolvedPins resolve_pins(const SmModel& model, const PinMap& pm, kernel::IoConfig io) {
  ResolvedPins r;
  r.input.assign(model.inputs.size(), 0);
  r.invoke.assign(model.operations.size(), 0);
  r.arg.resize(model.operations.size());
  std::map<int, std::string> used_in, used_out;
  auto claim = [](std::map<int, std::string>& used, int pin, int limit, const std::string& who, const char* side) {
    if (pin > limit) {
      throw Error("E_PIN_OVERFLOW", who + " needs " + side + " pin " + std::to_string(pin) + "; the board has " +
                                        std::to_string(limit));
    }
    auto [it, fresh] = used.emplace(pin, who);
    if (!fresh) throw Error("E_PIN_OVERFLOW", std::string(side) + " pin " + std::to_string(pin) + " given to both " + it->second + " and " + who);
  };
  for (const auto& [name, pin] : pm.inputs) {
    int i = model.input(name);
    if (i < 0) throw Error("E_PIN_OVERFLOW", "pin map names unknown input '" + name + "'");
    if (r.input[static_cast<std::size_t>(i)]) throw Error("E_PIN_OVERFLOW", "input '" + name + "' mapped twice");
    claim(used_in, pin, io.inputs, "input " + name, "input");
    r.input[static_cast<std::size_t>(i)] = pin;
  }
  for (const auto& o : pm.outputs) {
    int k = model.operation(o.op);
    if (k < 0) throw Error("E_PIN_OVERFLOW", "pin map names unknown operation '" + o.op + "'");
    auto ku = static_cast<std::size_t>(k);
    const auto& op = model.operations[ku];
    if (r.invoke[ku]) throw Error("E_PIN_OVERFLOW", "operation '" + o.op + "' mapped twice");
    claim(used_out, o.invoke, io.outputs, op.name, "output");
    r.invoke[ku] = o.invoke;
    r.arg[ku].resize(op.params.size());
    for (const auto& a : o.args) {
      std::size_t p = 0;
      while (p < op.params.size() && op.params[p].name != a.param) ++p;
      if (p == op.params.size()) throw Error("E_PIN_OVERFLOW", "'" + o.op + "' has no parameter '" + a.param + "'");
      if (!r.arg[ku][p].empty()) throw Error("E_PIN_OVERFLOW", "parameter '" + a.param + "' mapped twice");
      int bits = bits_for(op.params[p].range);
      int given = a.last - a.first + 1;
      if (given < bits) {
        throw Error("E_PIN_OVERFLOW", "parameter " + op.name + "." + a.param + " needs " + std::to_string(bits) +
                                          " pins, the map gives " + std::to_string(given));
      }
      for (int pin = a.first; pin <= a.last; ++pin) {
        claim(used_out, pin, io.outputs, op.name + "." + a.param, "output");
        r.arg[ku][p].push_back(pin);
      }
    }
  }
  for (std::size_t i = 0; i < model.inputs.size(); ++i) {
    if (!r.input[i]) throw Error("E_PIN_OVERFLOW", "input '" + model.inputs[i].name + "' has no pin");
  }
  for (std::size_t k = 0; k < model.operations.size(); ++k) {
    if (!r.invoke[k]) throw Error("E_PIN_OVERFLOW", "operation '" + model.operations[k].name + "' has no pin");
    for (std::size_t p = 0; p < model.operations[k].params.size(); ++p) {
      if (r.arg[k][p].empty()) {
        throw Error("E_PIN_OVERFLOW",
                    "parameter " + model.operations[k].name + "." + model.operations[k].params[p].name + " has no pins");
      }
    }
  }
  return r;
}

std::vector<bool> encode_bits(std::int64_t value, int bits) {
  if (value < 0 || (bits < 63 && value >= (std::int64_t{1} << bits))) {
    throw Error("E_CONST_RANGE", std::to_string(value) + " does not fit in " + std::to_string(bits) + " bits");
  }
  std::vector<bool> out(static_cast<std::size_t>(bits));
  for (int b = 0; b < bits; ++b) out[static_cast<std::size_t>(b)] = (value >> b) & 1;
  return out;
}

std::array<bool, 3> encode_arg(std::int64_t value) {
  if (value < 0 || value > 7) throw Error("E_CONST_RANGE", std::to_string(value) + " is outside 0..7");
  return {((value >> 2) & 1) != 0, ((value >> 1) & 1) != 0, (value & 1) != 0};
}

}  // namespace vigil::sm
