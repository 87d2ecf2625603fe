#include "vigil/relay/netlist.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::relay {

namespace {

int index_of(const std::vector<std::string>& v, std::string_view name) {
  auto it = std::find(v.begin(), v.end(), name);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

enum class Section { None, Relays, Inputs, Outputs, Strands };

// Splits a strand line on ',' and on '--'.
std::vector<std::string> strand_items(std::string_view line) {
  std::string s(line);
  for (std::size_t at = s.find("--"); at != std::string::npos; at = s.find("--")) s.replace(at, 2, ",");
  std::vector<std::string> out;
  for (auto& piece : text::split(s, ',')) {
    if (!piece.empty()) out.push_back(piece);
  }
  return out;
}

class Parser {
 public:
  Netlist run(std::string_view src) {
    auto all = text::lines(src);
    // declarations first so strands may precede nothing in particular
    std::vector<std::pair<int, std::string>> strand_lines;
    Section sec = Section::None;
    for (std::size_t i = 0; i < all.size(); ++i) {
      int line = static_cast<int>(i) + 1;
      std::string body(text::trim(std::string_view(all[i]).substr(0, all[i].find('#'))));
      if (body.empty()) continue;
      if (body == "RELAYS") { sec = Section::Relays; continue; }
      if (body == "INPUTS") { sec = Section::Inputs; continue; }
      if (body == "OUTPUTS") { sec = Section::Outputs; continue; }
      if (body == "STRANDS") { sec = Section::Strands; continue; }
      switch (sec) {
        case Section::None:
          diag("E_SYNTAX", line, "expected a section header (RELAYS, INPUTS, OUTPUTS, STRANDS)");
          break;
        case Section::Relays:
          for (auto& w : names(body)) declare(n_.relays, w, line);
          break;
        case Section::Outputs:
          for (auto& w : names(body)) declare(n_.outputs, w, line);
          break;
        case Section::Inputs: {
          auto eq = body.find('=');
          std::string name(text::trim(std::string_view(body).substr(0, eq)));
          bool on = false;
          if (eq != std::string::npos) {
            auto v = text::trim(std::string_view(body).substr(eq + 1));
            if (v == "ON") on = true;
            else if (v != "OFF") diag("E_SYNTAX", line, "input default must be ON or OFF");
          }
          if (name.find_first_of(" \t,") != std::string::npos) {
            diag("E_SYNTAX", line, "one input per line: NAME [= ON|OFF]");
            break;
          }
          if (declare(n_.inputs, name, line)) n_.input_default.push_back(on);
          break;
        }
        case Section::Strands:
          strand_lines.emplace_back(line, body);
          break;
      }
    }
    for (auto& [line, body] : strand_lines) strand(line, body);
    check_junctions();
    if (!diags_.empty()) throw ParseError(std::move(diags_));
    return std::move(n_);
  }

 private:
  void diag(const char* code, int line, std::string msg) { diags_.push_back({code, line, 1, std::move(msg)}); }

  std::vector<std::string> names(const std::string& body) {
    std::string s = body;
    std::replace(s.begin(), s.end(), ',', ' ');
    return text::words(s);
  }

  bool declare(std::vector<std::string>& into, const std::string& name, int line) {
    if (!text::is_identifier(name)) {
      diag("E_SYNTAX", line, "bad name '" + name + "'");
      return false;
    }
    if (declared_.count(name)) {
      diag("E_DUPLICATE_NAME", line, "'" + name + "' already declared on line " + std::to_string(declared_[name]));
      return false;
    }
    declared_[name] = line;
    into.push_back(name);
    return true;
  }

  int junction(const std::string& name) {
    int j = index_of(n_.junctions, name);
    if (j >= 0) return j;
    n_.junctions.push_back(name);
    return static_cast<int>(n_.junctions.size()) - 1;
  }

  // Parses `word(arg)`; returns false when the item has no parenthesis.
  static bool call(const std::string& item, std::string& fn, std::string& arg) {
    auto open = item.find('(');
    if (open == std::string::npos || item.back() != ')') return false;
    fn = std::string(text::trim(std::string_view(item).substr(0, open)));
    arg = std::string(text::trim(std::string_view(item).substr(open + 1, item.size() - open - 2)));
    return true;
  }

  void strand(int line, const std::string& body) {
    auto items = strand_items(body);
    if (items.size() < 2) {
      diag("E_DANGLING_STRAND", line, "a strand needs a start and an end terminal");
      return;
    }
    Strand s;
    s.line = line;
    bool ok = true;
    auto terminal = [&](const std::string& item, bool start, Terminal& t) {
      std::string fn, arg;
      if (item == "P+" || item == "N-") {
        if ((item == "P+") != start) {
          diag("E_DANGLING_STRAND", line, item + (start ? " cannot start a strand" : " cannot end a strand"));
          return false;
        }
        t.kind = start ? TerminalKind::Positive : TerminalKind::Negative;
        return true;
      }
      if (!call(item, fn, arg)) {
        diag("E_SYNTAX", line, "bad strand element '" + item + "'");
        return false;
      }
      if (fn == "node") {
        t = {TerminalKind::Junction, junction(arg)};
        (start ? starts_ : ends_).insert(t.index);
        return true;
      }
      if (fn == "in" && start) {
        int i = n_.input(arg);
        if (i < 0) diag("E_DANGLING_STRAND", line, "strand starts at undeclared input '" + arg + "'");
        t = {TerminalKind::Input, i};
        return i >= 0;
      }
      if (fn == "out" && !start) {
        int o = n_.output(arg);
        if (o < 0) diag("E_DANGLING_STRAND", line, "strand ends at undeclared output '" + arg + "'");
        t = {TerminalKind::Output, o};
        return o >= 0;
      }
      diag("E_DANGLING_STRAND", line,
           std::string("strand must ") + (start ? "start at P+, in(X) or node(J)" : "end at N-, out(Y) or node(J)") +
               ", found '" + item + "'");
      return false;
    };
    ok &= terminal(items.front(), true, s.from);
    ok &= terminal(items.back(), false, s.to);
    for (std::size_t i = 1; i + 1 < items.size(); ++i) {
      std::string fn, arg;
      if (items[i] == "P+" || items[i] == "N-" || (call(items[i], fn, arg) && (fn == "in" || fn == "out" || fn == "node"))) {
        diag("E_DANGLING_STRAND", line, "terminal '" + items[i] + "' inside a strand; split it with node(J)");
        ok = false;
        continue;
      }
      if (!call(items[i], fn, arg) || (fn != "no" && fn != "nc" && fn != "coil")) {
        diag("E_SYNTAX", line, "bad strand element '" + items[i] + "'");
        ok = false;
        continue;
      }
      int r = n_.relay(arg);
      if (r < 0) {
        diag("E_UNKNOWN_RELAY", line, "'" + arg + "' is not a declared relay");
        ok = false;
        continue;
      }
      s.elements.push_back({fn == "no" ? ContactKind::NormallyOpen : fn == "nc" ? ContactKind::NormallyClosed
                                                                                : ContactKind::Coil,
                            r});
    }
    if (ok) n_.strands.push_back(std::move(s));
  }

  void check_junctions() {
    for (std::size_t j = 0; j < n_.junctions.size(); ++j) {
      int ji = static_cast<int>(j);
      if (!starts_.count(ji) || !ends_.count(ji)) {
        diag("E_DANGLING_STRAND", 0, "junction '" + n_.junctions[j] + "' needs both an incoming and an outgoing strand");
      }
    }
    // junction graph must be acyclic so that path elaboration terminates
    std::vector<int> state(n_.junctions.size(), 0);
    bool cyclic = false;
    auto visit = [&](auto&& self, int j) -> void {
      state[static_cast<std::size_t>(j)] = 1;
      for (const auto& s : n_.strands) {
        if (s.from.kind != TerminalKind::Junction || s.from.index != j || s.to.kind != TerminalKind::Junction) continue;
        int k = s.to.index;
        if (state[static_cast<std::size_t>(k)] == 1) cyclic = true;
        else if (state[static_cast<std::size_t>(k)] == 0) self(self, k);
      }
      state[static_cast<std::size_t>(j)] = 2;
    };
    for (std::size_t j = 0; j < n_.junctions.size(); ++j) {
      if (state[j] == 0) visit(visit, static_cast<int>(j));
    }
    if (cyclic) diag("E_DANGLING_STRAND", 0, "junctions form a loop; current direction would be undefined");
  }

  Netlist n_;
  std::vector<Diagnostic> diags_;
  std::map<std::string, int> declared_;
  std::set<int> starts_, ends_;
};

}  // namespace

int Netlist::relay(std::string_view name) const { return index_of(relays, name); }
int Netlist::input(std::string_view name) const { return index_of(inputs, name); }
int Netlist::output(std::string_view name) const { return index_of(outputs, name); }

Netlist parse_netlist(std::string_view text) { return Parser().run(text); }

std::string format_netlist(const Netlist& n) {
  auto term = [&](const Terminal& t) -> std::string {
    switch (t.kind) {
      case TerminalKind::Positive: return "P+";
      case TerminalKind::Negative: return "N-";
      case TerminalKind::Input: return "in(" + n.inputs[static_cast<std::size_t>(t.index)] + ")";
      case TerminalKind::Output: return "out(" + n.outputs[static_cast<std::size_t>(t.index)] + ")";
      case TerminalKind::Junction: return "node(" + n.junctions[static_cast<std::size_t>(t.index)] + ")";
    }
    return "?";
  };
  std::string out = "RELAYS\n";
  for (const auto& r : n.relays) out += "  " + r + "\n";
  out += "INPUTS\n";
  for (std::size_t i = 0; i < n.inputs.size(); ++i) {
    out += "  " + n.inputs[i] + (n.input_default[i] ? " = ON" : " = OFF") + "\n";
  }
  out += "OUTPUTS\n";
  for (const auto& o : n.outputs) out += "  " + o + "\n";
  out += "STRANDS\n";
  for (const auto& s : n.strands) {
    out += "  " + term(s.from);
    for (const auto& e : s.elements) {
      static const char* kFn[] = {"no", "nc", "coil"};
      out += " , " + std::string(kFn[static_cast<int>(e.kind)]) + "(" + n.relays[static_cast<std::size_t>(e.relay)] + ")";
    }
    out += " , " + term(s.to) + "\n";
  }
  return out;
}

}  // namespace vigil::relay
