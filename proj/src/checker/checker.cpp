#include "vigil/checker/checker.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

#include "vigil/common/error.hpp"
#include "vigil/kernel/interpreter.hpp"

namespace vigil::checker {

namespace {

using kernel::CyclicProgram;
using kernel::VarKind;
using kernel::VarStore;

bool reads_clock(const kernel::Expr& e) {
  if (e.kind == kernel::ExprKind::Tick || e.kind == kernel::ExprKind::Since) return true;
  return std::any_of(e.args.begin(), e.args.end(), reads_clock);
}

bool reads_clock(const std::vector<kernel::Stmt>& body) {
  for (const auto& s : body) {
    if (reads_clock(s.value) || reads_clock(s.cond) || reads_clock(s.then_body) || reads_clock(s.else_body)) return true;
  }
  return false;
}

struct Node {
  VarStore store;
  int parent = -1;
  std::uint32_t input = 0;
};

struct Outcome {
  VarStore store;
  bool vital = false;
  bool violates = false;
};

class Checker {
 public:
  Checker(const CyclicProgram& p, const Property& prop, const CheckOptions& opt) : p_(p), opt_(opt), f_(prop.formula) {
    if (reads_clock(p.init) || reads_clock(p.logic)) {
      throw Error("E_UNBOUNDED_VAR", "the program reads the board clock, so its state grows without bound");
    }
    bind(f_, p_);
    for (std::size_t i = 0; i < p.decls.size(); ++i) {
      const auto& d = p.decls[i];
      if (d.kind == VarKind::State || d.kind == VarKind::Output) key_vars_.push_back(i);
      if (d.kind == VarKind::Input) inputs_.push_back(d.pin);
      if (d.kind == VarKind::Output) outputs_.push_back(i);
    }
    if (inputs_.size() > 24) {
      throw Error("E_STATE_EXPLOSION", std::to_string(inputs_.size()) + " inputs give 2^" +
                                           std::to_string(inputs_.size()) + " vectors per state");
    }
    vectors_ = 1u << inputs_.size();
    if (vectors_ > opt_.max_states) {
      throw Error("E_STATE_EXPLOSION", std::to_string(vectors_) + " input vectors per state exceed the cap of " +
                                           std::to_string(opt_.max_states));
    }
  }

  CheckResult run() {
    CheckResult r;
    nodes_.push_back({kernel::initial_store(p_), -1, 0});
    visited_.emplace(key(nodes_[0].store), 0);
    std::vector<int> frontier{0};
    const std::size_t block = std::max<std::size_t>(1, 4096 / vectors_);
    for (int level = 0; level < opt_.depth && !frontier.empty(); ++level) {
      std::vector<int> next;
      for (std::size_t b = 0; b < frontier.size(); b += block) {
        std::size_t e = std::min(frontier.size(), b + block);
        auto outcomes = expand(frontier, b, e);
        for (std::size_t i = b; i < e; ++i) {
          for (std::uint32_t v = 0; v < vectors_; ++v) {
            if (++r.states_explored > opt_.max_states) {
              throw Error("E_STATE_EXPLOSION", "more than " + std::to_string(opt_.max_states) +
                                                   " (state, input) pairs within " + std::to_string(level + 1) +
                                                   " cycles");
            }
            auto& o = outcomes[(i - b) * vectors_ + v];
            if (o.violates) {
              r.verified = false;
              r.depth = level + 1;
              r.vital_fault = o.vital;
              r.violating = std::move(o.store);
              r.trace = trace(frontier[i], v);
              r.distinct_states = visited_.size();
              return r;
            }
            if (o.vital) continue;
            auto [it, fresh] = visited_.emplace(key(o.store), static_cast<int>(nodes_.size()));
            if (!fresh) continue;
            nodes_.push_back({std::move(o.store), frontier[i], v});
            next.push_back(it->second);
          }
        }
      }
      frontier = std::move(next);
    }
    r.verified = true;
    r.depth = opt_.depth;
    r.exhaustive = frontier.empty();
    r.distinct_states = visited_.size();
    return r;
  }

 private:
  kernel::InputVector vector_of(std::uint32_t v) const {
    kernel::InputVector in(static_cast<std::size_t>(p_.io.inputs), kernel::kIoOff);
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      in[static_cast<std::size_t>(inputs_[i] - 1)] = (v >> i) & 1u ? kernel::kIoOn : kernel::kIoOff;
    }
    return in;
  }

  Outcome step(const VarStore& from, std::uint32_t v) const {
    auto c = kernel::interpret_cycle(p_, from, vector_of(v), 0);
    Outcome o{std::move(c.store), c.vital_fault(), false};
    if (o.vital) {
      // panic: every physical output is OFF
      VarStore seen = o.store;
      for (auto i : outputs_) seen[i] = kernel::kIoOff;
      o.violates = !holds(f_, p_, seen);
    } else {
      o.violates = !holds(f_, p_, o.store);
    }
    return o;
  }

  // Successors of frontier[b, e) for every input vector, row-major.
  std::vector<Outcome> expand(const std::vector<int>& frontier, std::size_t b, std::size_t e) const {
    std::vector<Outcome> out((e - b) * vectors_);
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        std::size_t i = k / vectors_;
        auto v = static_cast<std::uint32_t>(k % vectors_);
        out[k] = step(nodes_[static_cast<std::size_t>(frontier[b + i])].store, v);
      }
    };
    std::size_t total = out.size();
    auto jobs = static_cast<std::size_t>(std::max(1, opt_.jobs));
    if (jobs == 1 || total < 64) {
      work(0, total);
      return out;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (total + jobs - 1) / jobs;
    for (std::size_t lo = 0; lo < total; lo += chunk) pool.emplace_back(work, lo, std::min(total, lo + chunk));
    for (auto& t : pool) t.join();
    return out;
  }

  std::string key(const VarStore& s) const {
    std::string k;
    k.reserve(key_vars_.size() * 4);
    for (auto i : key_vars_) {
      std::uint32_t v = s[i];
      for (int b = 0; b < 4; ++b) k.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
    }
    return k;
  }

  std::vector<kernel::InputVector> trace(int node, std::uint32_t last) const {
    std::vector<kernel::InputVector> out{vector_of(last)};
    for (int n = node; nodes_[static_cast<std::size_t>(n)].parent >= 0; n = nodes_[static_cast<std::size_t>(n)].parent) {
      out.push_back(vector_of(nodes_[static_cast<std::size_t>(n)].input));
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  const CyclicProgram& p_;
  const CheckOptions& opt_;
  Formula f_;
  std::vector<std::size_t> key_vars_;
  std::vector<int> inputs_;  // pins
  std::vector<std::size_t> outputs_;
  std::uint32_t vectors_ = 1;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> visited_;
};

}  // namespace

CheckResult model_check(const CyclicProgram& program, const Property& property, const CheckOptions& opt) {
  return Checker(program, property, opt).run();
}

std::string counterexample_scenario(const CyclicProgram& program, const Property& property, const CheckResult& r) {
  std::string out = "# counterexample for " + property.name + ": " + property.text + "\n";
  out += "# violated after cycle " + std::to_string(r.trace.size() - 1) + (r.vital_fault ? " (board in panic)" : "") + "\n";
  kernel::InputVector prev(static_cast<std::size_t>(program.io.inputs), kernel::kIoOff);
  for (std::size_t c = 0; c < r.trace.size(); ++c) {
    for (std::size_t pin = 0; pin < prev.size(); ++pin) {
      if (r.trace[c][pin] != prev[pin]) {
        out += "at " + std::to_string(c) + " input " + std::to_string(pin + 1) +
               (r.trace[c][pin] == kernel::kIoOn ? " ON" : " OFF") + "\n";
      }
    }
    prev = r.trace[c];
  }
  out += "run " + std::to_string(r.trace.size()) + "\n";
  return out;
}

}  // namespace vigil::checker
