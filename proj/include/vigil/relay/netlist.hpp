#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vigil::relay {

enum class TerminalKind { Positive, Negative, Input, Output, Junction };

struct Terminal {
  TerminalKind kind = TerminalKind::Positive;
  int index = -1;  // into inputs, outputs or junctions; -1 for P+ / N-

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

enum class ContactKind { NormallyOpen, NormallyClosed, Coil };

struct Element {
  ContactKind kind = ContactKind::Coil;
  int relay = 0;
};

/// A directed wire segment: current enters at `from` and leaves at `to`.
struct Strand {
  Terminal from;
  Terminal to;
  std::vector<Element> elements;
  int line = 0;
};

struct Netlist {
  std::vector<std::string> relays;
  std::vector<std::string> inputs;
  std::vector<bool> input_default;  // drawn state, OFF unless declared
  std::vector<std::string> outputs;
  std::vector<std::string> junctions;
  std::vector<Strand> strands;

  int relay(std::string_view name) const;
  int input(std::string_view name) const;
  int output(std::string_view name) const;
};

/// Sections RELAYS, INPUTS, OUTPUTS, STRANDS. Strand elements are separated
/// by `,` or `--`: P+, N-, in(X), out(Y), node(J), no(R), nc(R), coil(R).
/// Throws ParseError with E_UNKNOWN_RELAY, E_DANGLING_STRAND,
/// E_DUPLICATE_NAME or E_SYNTAX diagnostics.
Netlist parse_netlist(std::string_view text);

std::string format_netlist(const Netlist& n);

}  // namespace vigil::relay
