#include "random_netlist.hpp"

#include <vector>

namespace vigil::testing {

std::string random_netlist(std::mt19937_64& rng, int max_relays, int max_inputs, int max_outputs) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  int relays = 1 + pick(max_relays);
  int inputs = 1 + pick(max_inputs);
  int outputs = 1 + pick(max_outputs);
  int junctions = pick(3);

  auto relay = [&] { return "R" + std::to_string(pick(relays)); };
  auto contacts = [&] {
    std::string s;
    int n = pick(4);
    for (int i = 0; i < n; ++i) s += std::string(pick(2) ? " , no(" : " , nc(") + relay() + ")";
    return s;
  };
  auto source = [&] { return pick(3) == 0 ? std::string("P+") : "in(I" + std::to_string(pick(inputs)) + ")"; };
  auto sink = [&] {
    if (pick(3) == 0) return " , out(Y" + std::to_string(pick(outputs)) + ")";
    return " , coil(" + relay() + ") , N-";
  };

  std::string s = "RELAYS\n ";
  for (int i = 0; i < relays; ++i) s += " R" + std::to_string(i);
  s += "\nINPUTS\n";
  for (int i = 0; i < inputs; ++i) s += "  I" + std::to_string(i) + (pick(4) == 0 ? " = ON\n" : "\n");
  s += "OUTPUTS\n";
  for (int i = 0; i < outputs; ++i) s += "  Y" + std::to_string(i) + "\n";
  s += "STRANDS\n";
  // every relay gets at least one coil strand
  for (int r = 0; r < relays; ++r) s += "  " + source() + contacts() + " , coil(R" + std::to_string(r) + ") , N-\n";
  for (int y = 0; y < outputs; ++y) s += "  " + source() + contacts() + " , out(Y" + std::to_string(y) + ")\n";
  for (int j = 0; j < junctions; ++j) {
    std::string node = "node(J" + std::to_string(j) + ")";
    s += "  " + source() + contacts() + " , " + node + "\n";
    int fan = 1 + pick(2);
    for (int k = 0; k < fan; ++k) {
      if (j + 1 < junctions && pick(3) == 0) {
        s += "  " + node + contacts() + " , node(J" + std::to_string(j + 1) + ")\n";
      } else {
        s += "  " + node + contacts() + sink() + "\n";
      }
    }
  }
  int extra = pick(4);
  for (int i = 0; i < extra; ++i) s += "  " + source() + contacts() + sink() + "\n";
  return s;
}

}  // namespace vigil::testing
