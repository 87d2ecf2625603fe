#include <cctype>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/sm/model.hpp"

namespace vigil::sm {

namespace {

struct Token {
  enum class Kind { Ident, Number, Sym, End } kind = Kind::End;
  std::string text;
  std::int64_t number = 0;
};

class SyntaxError : public std::exception {
 public:
  SyntaxError(std::string code, std::string msg) : code(std::move(code)), msg(std::move(msg)) {}
  std::string code;
  std::string msg;
};

[[noreturn]] void fail(const std::string& msg) { throw SyntaxError("E_SYNTAX", msg); }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '.')) ++j;
      out.push_back({Token::Kind::Ident, std::string(s.substr(i, j - i)), 0});
      i = j;
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
      auto v = text::parse_uint(s.substr(i, j - i));
      if (!v || *v > 0xFFFFFFFFu) fail("bad number '" + std::string(s.substr(i, j - i)) + "'");
      out.push_back({Token::Kind::Number, std::string(s.substr(i, j - i)), static_cast<std::int64_t>(*v)});
      i = j;
    } else {
      static const char* kTwo[] = {"<=", ">=", "!=", "==", "->", ".."};
      std::string sym(1, static_cast<char>(c));
      for (const char* t : kTwo) {
        if (s.substr(i, 2) == t) sym = t;
      }
      if (sym.size() == 1 && std::string_view("$#(),;+-*/<>=![]:").find(static_cast<char>(c)) == std::string_view::npos) {
        fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
      }
      out.push_back({Token::Kind::Sym, sym, 0});
      i += sym.size();
    }
  }
  out.push_back({Token::Kind::End, "", 0});
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> t) : t_(std::move(t)) {}
  const Token& peek() const { return t_[p_]; }
  Token next() { return t_[p_ == t_.size() - 1 ? p_ : p_++]; }
  bool sym(std::string_view s) const { return peek().kind == Token::Kind::Sym && peek().text == s; }
  bool word(std::string_view s) const { return peek().kind == Token::Kind::Ident && peek().text == s; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  void expect(std::string_view s) {
    if (!sym(s)) fail("expected '" + std::string(s) + "'" + (at_end() ? "" : ", found '" + peek().text + "'"));
    next();
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
    return next().text;
  }
  std::int64_t integer() {
    bool neg = false;
    if (sym("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Token::Kind::Number) fail("expected a number");
    auto v = next().number;
    return neg ? -v : v;
  }
  void done() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
  }

 private:
  std::vector<Token> t_;
  std::size_t p_ = 0;
};

class Parser {
 public:
  SmModel run(std::string_view src) {
    struct Pending {
      int machine, state, line;  // state >= 0: entry line
      std::string body;
    };
    std::vector<Pending> pending;
    int machine = -1;
    int last_state = -1;
    int number = 0;
    for (const auto& raw : text::lines(src)) {
      ++number;
      line_ = number;
      std::string body(text::trim(std::string_view(raw).substr(0, raw.find('#') == 0 ? 0 : comment_at(raw))));
      if (body.empty()) continue;
      auto ws = text::words(body);
      const std::string& kw = ws[0];
      try {
        if (machine < 0) {
          if (kw == "const") constant(body.substr(5));
          else if (kw == "input") input(body.substr(5));
          else if (kw == "operation") operation(body.substr(9));
          else if (kw == "machine") {
            if (ws.size() != 2 || !text::is_identifier(ws[1])) fail("expected 'machine NAME'");
            for (const auto& m : m_.machines) {
              if (m.name == ws[1]) throw SyntaxError("E_DUPLICATE_NAME", "machine '" + ws[1] + "' already declared");
            }
            m_.machines.push_back({});
            m_.machines.back().name = ws[1];
            machine = static_cast<int>(m_.machines.size()) - 1;
            last_state = -1;
            machine_line_ = number;
          } else {
            fail("expected const, input, operation or machine");
          }
          continue;
        }
        auto& m = m_.machines[static_cast<std::size_t>(machine)];
        if (kw == "end") {
          if (ws.size() != 1) fail("unexpected text after 'end'");
          machine = -1;
        } else if (kw == "cycle") {
          auto v = ws.size() == 2 ? text::parse_uint(ws[1]) : std::nullopt;
          if (!v || *v == 0 || *v > 0xFFFF) fail("expected 'cycle N' with N >= 1");
          m.cycle = static_cast<std::uint32_t>(*v);
        } else if (kw == "clock") {
          if (ws.size() != 2 || !text::is_identifier(ws[1])) fail("expected 'clock NAME'");
          if (m.clock(ws[1]) >= 0) throw SyntaxError("E_DUPLICATE_NAME", "clock '" + ws[1] + "' already declared");
          m.clocks.push_back(ws[1]);
        } else if (kw == "state") {
          if (ws.size() != 2 || !text::is_identifier(ws[1]) || ws[1] == "initial") fail("expected 'state NAME'");
          if (m.state(ws[1]) >= 0) throw SyntaxError("E_DUPLICATE_NAME", "state '" + ws[1] + "' already declared");
          m.states.push_back({ws[1], {}, number});
          last_state = static_cast<int>(m.states.size()) - 1;
        } else if (kw == "entry") {
          if (last_state < 0) fail("'entry' must follow a state declaration");
          pending.push_back({machine, last_state, number, body.substr(5)});
        } else if (body.find("->") != std::string::npos) {
          last_state = -1;
          pending.push_back({machine, -1, number, body});
        } else {
          fail("expected cycle, clock, state, entry, a transition or end");
        }
      } catch (const SyntaxError& e) {
        diag(e.code, e.msg);
      }
    }
    if (machine >= 0) {
      line_ = machine_line_;
      diag("E_SYNTAX", "machine '" + m_.machines[static_cast<std::size_t>(machine)].name + "' lacks 'end'");
    }
    for (const auto& p : pending) {
      line_ = p.line;
      try {
        auto& m = m_.machines[static_cast<std::size_t>(p.machine)];
        if (p.state >= 0) {
          Cursor c(tokenize(p.body));
          auto acts = actions(c, m);
          c.done();
          auto& e = m.states[static_cast<std::size_t>(p.state)].entry;
          e.insert(e.end(), acts.begin(), acts.end());
        } else {
          transition(p.body, m);
        }
      } catch (const SyntaxError& e) {
        diag(e.code, e.msg);
      } catch (const Error& e) {
        diag(e.code(), e.what());
      }
    }
    for (const auto& m : m_.machines) {
      bool has_initial = false;
      for (const auto& t : m.transitions) has_initial |= t.src == kJunction;
      if (!has_initial) {
        line_ = 0;
        diag("E_SYNTAX", "machine '" + m.name + "' has no 'initial -> STATE' transition");
      }
    }
    if (m_.machines.empty()) {
      line_ = 0;
      diag("E_SYNTAX", "no machine declared");
    }
    if (!diags_.empty()) throw ParseError(std::move(diags_));
    return std::move(m_);
  }

 private:
  static std::size_t comment_at(const std::string& raw) {
    // '#' starts a comment only at the beginning of a line or after whitespace
    // followed by a space; `#MBC` is a clock reset.
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '#' && (i + 1 == raw.size() || raw[i + 1] == ' ' || raw[i + 1] == '#')) return i;
    }
    return raw.size();
  }

  void diag(const std::string& code, std::string msg) { diags_.push_back({code, line_, 1, std::move(msg)}); }

  void unique(const std::string& name) {
    if (m_.constant(name) >= 0 || m_.input(name) >= 0 || m_.operation(name) >= 0) {
      throw SyntaxError("E_DUPLICATE_NAME", "'" + name + "' already declared");
    }
  }

  static void split_qualified(const std::string& q, std::string& iface, std::string& name) {
    auto dot = q.find('.');
    iface = dot == std::string::npos ? "" : q.substr(0, dot);
    name = dot == std::string::npos ? q : q.substr(dot + 1);
    if ((!iface.empty() && !text::is_identifier(iface)) || !text::is_identifier(name)) fail("bad name '" + q + "'");
  }

  Range range(Cursor& c) {
    Range r;
    r.lo = c.integer();
    c.expect("..");
    r.hi = c.integer();
    if (r.lo > r.hi) fail("empty range");
    return r;
  }

  // NAME [: lo..hi] [= value]
  void constant(const std::string& body) {
    Cursor c(tokenize(body));
    Constant k;
    k.line = line_;
    k.name = c.ident("a constant name");
    if (!text::is_identifier(k.name)) fail("bad constant name '" + k.name + "'");
    if (c.sym(":")) {
      c.next();
      k.range = range(c);
    }
    if (c.sym("=")) {
      c.next();
      k.value = c.integer();
    }
    c.done();
    unique(k.name);
    m_.constants.push_back(std::move(k));
  }

  void input(const std::string& body) {
    Cursor c(tokenize(body));
    InputDecl in;
    in.line = line_;
    split_qualified(c.ident("an input name"), in.interface, in.name);
    c.done();
    unique(in.name);
    m_.inputs.push_back(std::move(in));
  }

  // [Iface.]name(p : lo..hi, ...)
  void operation(const std::string& body) {
    Cursor c(tokenize(body));
    Operation op;
    op.line = line_;
    split_qualified(c.ident("an operation name"), op.interface, op.name);
    c.expect("(");
    while (!c.sym(")")) {
      Param p;
      p.name = c.ident("a parameter name");
      c.expect(":");
      p.range = range(c);
      if (p.range.lo < 0) fail("parameter '" + p.name + "' must be non-negative");
      for (const auto& q : op.params) {
        if (q.name == p.name) throw SyntaxError("E_DUPLICATE_NAME", "parameter '" + p.name + "' repeated");
      }
      op.params.push_back(std::move(p));
      if (!c.sym(")")) c.expect(",");
    }
    c.next();
    c.done();
    unique(op.name);
    m_.operations.push_back(std::move(op));
  }

  ValueExpr value(Cursor& c) {
    ValueExpr lhs = product(c);
    while (c.sym("+") || c.sym("-")) {
      char op = c.next().text[0];
      lhs = binary(op, std::move(lhs), product(c));
    }
    return lhs;
  }

  ValueExpr product(Cursor& c) {
    ValueExpr lhs = unary(c);
    while (c.sym("*") || c.sym("/")) {
      char op = c.next().text[0];
      lhs = binary(op, std::move(lhs), unary(c));
    }
    return lhs;
  }

  static ValueExpr binary(char op, ValueExpr a, ValueExpr b) {
    ValueExpr e;
    e.kind = ValueExpr::Kind::Binary;
    e.op = op;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  ValueExpr unary(Cursor& c) {
    if (c.sym("-")) {
      c.next();
      ValueExpr zero;
      return binary('-', zero, unary(c));
    }
    if (c.sym("(")) {
      c.next();
      ValueExpr e = value(c);
      c.expect(")");
      return e;
    }
    if (c.peek().kind == Token::Kind::Number) {
      ValueExpr e;
      e.literal = c.next().number;
      return e;
    }
    std::string name = c.ident("a constant or a number");
    if (m_.constant(name) < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + name + "' is not a declared constant");
    ValueExpr e;
    e.kind = ValueExpr::Kind::Constant;
    e.name = name;
    return e;
  }

  Atom atom(Cursor& c, const CyclicStateMachine& m) {
    Atom a;
    bool negate = false;
    if (c.sym("!") || c.word("not")) {
      c.next();
      negate = true;
    }
    if (c.sym("$")) {
      c.next();
      std::string name = c.ident("an input name");
      a.input = m_.input(name);
      if (a.input < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + name + "' is not a declared input");
      a.kind = negate ? Atom::Kind::InputOff : Atom::Kind::InputOn;
      return a;
    }
    if (negate) fail("'!' applies to an input only");
    if (!c.word("since")) fail("expected $input, !$input, since(CLOCK) or true");
    c.next();
    c.expect("(");
    std::string clk = c.ident("a clock name");
    a.clock = m.clock(clk);
    if (a.clock < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + clk + "' is not a clock of machine '" + m.name + "'");
    c.expect(")");
    static const std::pair<const char*, kernel::CmpOp> kOps[] = {
        {"<", kernel::CmpOp::Lt}, {"<=", kernel::CmpOp::Le}, {">", kernel::CmpOp::Gt}, {">=", kernel::CmpOp::Ge},
        {"=", kernel::CmpOp::Eq}, {"==", kernel::CmpOp::Eq}, {"!=", kernel::CmpOp::Ne}};
    bool found = false;
    for (const auto& [s, op] : kOps) {
      if (c.sym(s)) {
        a.cmp = op;
        found = true;
      }
    }
    if (!found) fail("expected a comparison after since(" + clk + ")");
    c.next();
    a.kind = Atom::Kind::Clock;
    a.bound = value(c);
    return a;
  }

  Guard guard(Cursor& c, const CyclicStateMachine& m) {
    Guard g;
    if (c.word("true")) {
      c.next();
      return g;
    }
    g.push_back(atom(c, m));
    while (c.word("and")) {
      c.next();
      g.push_back(atom(c, m));
    }
    return g;
  }

  std::vector<Action> actions(Cursor& c, const CyclicStateMachine& m) {
    std::vector<Action> out;
    while (true) {
      Action a;
      if (c.sym("#")) {
        c.next();
        std::string clk = c.ident("a clock name");
        a.kind = Action::Kind::ResetClock;
        a.clock = m.clock(clk);
        if (a.clock < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + clk + "' is not a clock of machine '" + m.name + "'");
      } else if (c.sym("$")) {
        c.next();
        std::string name = c.ident("an operation name");
        a.op = m_.operation(name);
        if (a.op < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + name + "' is not a declared operation");
        c.expect("(");
        while (!c.sym(")")) {
          a.args.push_back(value(c));
          if (!c.sym(")")) c.expect(",");
        }
        c.next();
        const auto& op = m_.operations[static_cast<std::size_t>(a.op)];
        if (a.args.size() != op.params.size()) {
          fail("'" + op.name + "' takes " + std::to_string(op.params.size()) + " argument(s), given " +
               std::to_string(a.args.size()));
        }
      } else {
        fail("expected an action: $op(args) or #CLOCK");
      }
      out.push_back(std::move(a));
      if (!c.sym(";")) break;
      c.next();
    }
    return out;
  }

  // SRC -> DST [exec] [[guard]] [/ actions]
  void transition(const std::string& body, CyclicStateMachine& m) {
    Cursor c(tokenize(body));
    Transition t;
    t.line = line_;
    std::string src = c.ident("a source state");
    c.expect("->");
    std::string dst = c.ident("a target state");
    if (src == "initial") {
      t.src = kJunction;
    } else {
      t.src = m.state(src);
      if (t.src < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + src + "' is not a state of machine '" + m.name + "'");
    }
    t.dst = m.state(dst);
    if (t.dst < 0) throw SyntaxError("E_UNKNOWN_NAME", "'" + dst + "' is not a state of machine '" + m.name + "'");
    if (c.word("exec")) {
      c.next();
      t.exec = true;
      if (t.src == kJunction) fail("the initial junction cannot wait for exec");
    }
    if (c.sym("[")) {
      c.next();
      t.guard = guard(c, m);
      c.expect("]");
    }
    if (c.sym("/")) {
      c.next();
      t.actions = actions(c, m);
    }
    c.done();
    m.transitions.push_back(std::move(t));
  }

  SmModel m_;
  std::vector<Diagnostic> diags_;
  int line_ = 0;
  int machine_line_ = 0;
};

}  // namespace

SmModel parse_csm(std::string_view text) { return Parser().run(text); }

}  // namespace vigil::sm
