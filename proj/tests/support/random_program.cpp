#include "random_program.hpp"

#include <vector>

namespace vigil::testing {

namespace {

struct Var {
  std::string name;
  int width = 8;  // 0 = io
};

class Gen {
 public:
  Gen(std::mt19937_64& rng, const GenOptions& opt) : rng_(rng), opt_(opt) {}

  std::string run() {
    std::string src;
    if (opt_.constants > 0) {
      src += "CONSTANTS\n";
      for (int i = 0; i < opt_.constants; ++i) {
        int w = width();
        std::string n = "k" + std::to_string(i);
        src += "  " + n + " : u" + std::to_string(w) + " = " + std::to_string(literal(w)) + "\n";
        values_.push_back({n, w});
      }
    }
    src += "INPUTS\n";
    for (int i = 0; i < opt_.inputs; ++i) {
      std::string n = "in" + std::to_string(i);
      src += "  " + n + " : io\n";
      ios_.push_back({n, 0});
    }
    src += "OUTPUTS\n";
    for (int i = 0; i < opt_.outputs; ++i) {
      std::string n = "out" + std::to_string(i);
      src += "  " + n + " : io\n";
      outputs_.push_back({n, 0});
    }
    if (opt_.states > 0) src += "STATE\n";
    for (int i = 0; i < opt_.states; ++i) {
      std::string n = "s" + std::to_string(i);
      if (pick(4) == 0) {
        src += "  " + n + " : io = " + (pick(2) ? "IO_ON" : "IO_OFF") + "\n";
        ios_.push_back({n, 0});
        io_targets_.push_back({n, 0});
      } else {
        int w = width();
        src += "  " + n + " : u" + std::to_string(w) + " = " + std::to_string(literal(w)) + "\n";
        values_.push_back({n, w});
        targets_.push_back({n, w});
      }
    }
    std::string init = block(1, 1, 2);
    if (!init.empty()) src += "INIT\n" + init;
    src += "LOGIC\n";
    for (int i = 0; i < opt_.locals; ++i) {
      int w = width();
      std::string n = "t" + std::to_string(i);
      src += "  local " + n + " : u" + std::to_string(w) + "\n";
      src += "  " + n + " := " + expr(w, 2) + "\n";
      values_.push_back({n, w});
      targets_.push_back({n, w});
    }
    src += block(1, 0, opt_.max_stmts);
    for (const auto& o : outputs_) {
      if (pick(3) == 0) src += "  " + o.name + " := " + io_expr() + "\n";
    }
    return src;
  }

 private:
  int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

  int width() {
    static const int kW[] = {8, 16, 32};
    return kW[pick(3)];
  }

  std::uint64_t literal(int w) {
    switch (pick(4)) {
      case 0: return 0;
      case 1: return 1;
      case 2: return w == 32 ? 0xFFFFFFFFull : (1ull << w) - 1;
      default: return rng_() & (w == 32 ? 0xFFFFFFFFull : (1ull << w) - 1);
    }
  }

  const Var* value_of_width(int w) {
    std::vector<const Var*> c;
    for (const auto& v : values_) {
      if (v.width == w) c.push_back(&v);
    }
    return c.empty() ? nullptr : c[static_cast<std::size_t>(pick(static_cast<int>(c.size())))];
  }

  std::string expr(int w, int depth) {
    int choice = depth <= 0 ? pick(2) : pick(7);
    if (choice == 0) {
      if (const Var* v = value_of_width(w)) return v->name;
    }
    if (choice <= 1) return std::to_string(literal(w));
    if (choice == 2) {
      static const char* kOp[] = {"|", "&", "^"};
      return "(" + expr(w, depth - 1) + " " + kOp[pick(3)] + " " + expr(w, depth - 1) + ")";
    }
    if (choice == 3 && w == 32 && opt_.clock) return pick(2) ? "get_ms_tick()" : "since(" + expr(32, depth - 1) + ")";
    static const char* kFn[] = {"add", "sub", "mul"};
    return std::string(kFn[pick(3)]) + "_u" + std::to_string(w) + "(" + expr(w, depth - 1) + ", " +
           expr(w, depth - 1) + ")";
  }

  std::string io_expr() {
    if (pick(3) == 0) return pick(2) ? "IO_ON" : "IO_OFF";
    return ios_[static_cast<std::size_t>(pick(static_cast<int>(ios_.size())))].name;
  }

  std::string cond() {
    static const char* kCmp[] = {"=", "!=", "<", "<=", ">", ">="};
    if (pick(3) == 0) {
      return ios_[static_cast<std::size_t>(pick(static_cast<int>(ios_.size())))].name + (pick(2) ? " = " : " != ") +
             (pick(2) ? "IO_ON" : "IO_OFF");
    }
    int w = width();
    return expr(w, 2) + " " + kCmp[pick(6)] + " " + expr(w, 2);
  }

  std::string stmt(int indent, int depth) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    int k = pick(depth < opt_.max_depth ? 5 : 4);
    if (k == 4) {
      std::string s = pad + "if " + cond() + "\n";
      std::string then_body = block(indent + 1, depth + 1, 3);
      if (then_body.empty()) then_body = stmt(indent + 1, opt_.max_depth);
      s += then_body;
      if (pick(2)) {
        std::string else_body = block(indent + 1, depth + 1, 3);
        if (!else_body.empty()) s += pad + "else\n" + else_body;
      }
      return s;
    }
    if (k == 3 && !outputs_.empty()) {
      return pad + outputs_[static_cast<std::size_t>(pick(static_cast<int>(outputs_.size())))].name + " := " +
             io_expr() + "\n";
    }
    if (k == 2 && !io_targets_.empty()) {
      return pad + io_targets_[static_cast<std::size_t>(pick(static_cast<int>(io_targets_.size())))].name + " := " +
             io_expr() + "\n";
    }
    if (targets_.empty()) return pad + outputs_.front().name + " := " + io_expr() + "\n";
    const Var& t = targets_[static_cast<std::size_t>(pick(static_cast<int>(targets_.size())))];
    return pad + t.name + " := " + expr(t.width, 3) + "\n";
  }

  std::string block(int indent, int depth, int max) {
    std::string s;
    int n = pick(max + 1);
    for (int i = 0; i < n; ++i) s += stmt(indent, depth);
    return s;
  }

  std::mt19937_64& rng_;
  GenOptions opt_;
  std::vector<Var> values_;  // readable numeric registers
  std::vector<Var> targets_;  // writable numeric registers
  std::vector<Var> ios_;      // readable io registers
  std::vector<Var> io_targets_;
  std::vector<Var> outputs_;
};

}  // namespace

std::string random_program(std::mt19937_64& rng, const GenOptions& opt) { return Gen(rng, opt).run(); }

}  // namespace vigil::testing
