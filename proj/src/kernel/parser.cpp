#include "vigil/kernel/parser.hpp"

#include <cctype>
#include <map>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::kernel {
namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t number = 0;
  int col = 0;
};

class SyntaxError : public std::exception {
 public:
  SyntaxError(int col, std::string msg) : col(col), msg(std::move(msg)) {}
  int col;
  std::string msg;
};

std::vector<Token> tokenize(std::string_view s, int col0) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    int col = col0 + static_cast<int>(i);
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), 0, col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
      auto text = s.substr(i, j - i);
      auto v = text::parse_uint(text);
      if (!v) throw SyntaxError(col, "malformed number '" + std::string(text) + "'");
      out.push_back({Tok::Number, std::string(text), *v, col});
      i = j;
      continue;
    }
    if (c == '(') { out.push_back({Tok::LParen, "(", 0, col}); ++i; continue; }
    if (c == ')') { out.push_back({Tok::RParen, ")", 0, col}); ++i; continue; }
    if (c == ',') { out.push_back({Tok::Comma, ",", 0, col}); ++i; continue; }
    static const char* kTwo[] = {":=", "!=", "/=", "<=", ">=", "=="};
    bool matched = false;
    for (const char* op : kTwo) {
      if (s.substr(i, 2) == op) {
        out.push_back({Tok::Op, op, 0, col});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("=<>+-*&|^:@").find(c) != std::string_view::npos) {
      out.push_back({Tok::Op, std::string(1, c), 0, col});
      ++i;
      continue;
    }
    throw SyntaxError(col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", 0, col0 + static_cast<int>(s.size())});
  return out;
}

bool is_keyword_op(const Token& t, std::string_view word) {
  if (t.kind != Tok::Ident || t.text.size() != word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(t.text[i])) != word[i]) return false;
  }
  return true;
}

class ExprParser {
 public:
  ExprParser(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}

  Expr parse_full() {
    Expr e = logical();
    if (peek().kind != Tok::End) throw SyntaxError(peek().col, "unexpected '" + peek().text + "'");
    return e;
  }

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  bool at_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }

  Expr logical() {
    Expr lhs = comparison();
    while (is_keyword_op(peek(), "and") || is_keyword_op(peek(), "or")) {
      Token t = next();
      Expr e;
      e.kind = ExprKind::Logical;
      e.logic = is_keyword_op(t, "and") ? LogicOp::And : LogicOp::Or;
      e.loc = {line_, t.col};
      e.args.push_back(std::move(lhs));
      e.args.push_back(comparison());
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr comparison() {
    Expr lhs = bit_or();
    static const std::map<std::string, CmpOp> kOps = {
        {"=", CmpOp::Eq}, {"==", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"/=", CmpOp::Ne},
        {"<", CmpOp::Lt}, {"<=", CmpOp::Le}, {">", CmpOp::Gt}, {">=", CmpOp::Ge}};
    if (peek().kind == Tok::Op) {
      auto it = kOps.find(peek().text);
      if (it != kOps.end()) {
        Token t = next();
        Expr e;
        e.kind = ExprKind::Compare;
        e.cmp = it->second;
        e.loc = {line_, t.col};
        e.args.push_back(std::move(lhs));
        e.args.push_back(bit_or());
        return e;
      }
    }
    return lhs;
  }

  Expr binary_chain(Expr (ExprParser::*sub)(), std::string_view op, BitOp bop) {
    Expr lhs = (this->*sub)();
    while (at_op(op)) {
      Token t = next();
      Expr e;
      e.kind = ExprKind::Bitwise;
      e.bit = bop;
      e.loc = {line_, t.col};
      e.args.push_back(std::move(lhs));
      e.args.push_back((this->*sub)());
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr bit_or() { return binary_chain(&ExprParser::bit_xor, "|", BitOp::Or); }
  Expr bit_xor() { return binary_chain(&ExprParser::bit_and, "^", BitOp::Xor); }
  Expr bit_and() { return binary_chain(&ExprParser::additive, "&", BitOp::And); }

  Expr raw(ArithOp op, Expr lhs, Expr rhs, int col) {
    Expr e;
    e.kind = ExprKind::RawArith;
    e.arith = op;
    e.loc = {line_, col};
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (at_op("+") || at_op("-")) {
      Token t = next();
      lhs = raw(t.text == "+" ? ArithOp::Add : ArithOp::Sub, std::move(lhs), multiplicative(), t.col);
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = primary();
    while (at_op("*")) {
      Token t = next();
      lhs = raw(ArithOp::Mul, std::move(lhs), primary(), t.col);
    }
    return lhs;
  }

  Expr primary() {
    Token t = next();
    SourceLoc loc{line_, t.col};
    switch (t.kind) {
      case Tok::Number:
        return Expr::literal(t.number, loc);
      case Tok::LParen: {
        Expr e = logical();
        if (peek().kind != Tok::RParen) throw SyntaxError(peek().col, "expected ')'");
        next();
        return e;
      }
      case Tok::Ident: {
        if (t.text == "IO_ON") return Expr::literal(kIoOn, loc);
        if (t.text == "IO_OFF") return Expr::literal(kIoOff, loc);
        if (peek().kind != Tok::LParen) return Expr::var(t.text, loc);
        next();
        std::vector<Expr> args;
        if (peek().kind != Tok::RParen) {
          while (true) {
            args.push_back(logical());
            if (peek().kind == Tok::Comma) {
              next();
              continue;
            }
            break;
          }
        }
        if (peek().kind != Tok::RParen) throw SyntaxError(peek().col, "expected ')' after arguments");
        next();
        return make_call(t.text, std::move(args), loc);
      }
      default:
        throw SyntaxError(t.col, t.kind == Tok::End ? "unexpected end of expression"
                                                    : "unexpected '" + t.text + "'");
    }
  }

  static Expr make_call(const std::string& name, std::vector<Expr> args, SourceLoc loc) {
    Expr e;
    e.loc = loc;
    e.name = name;
    e.args = std::move(args);
    static const std::map<std::string, ArithOp> kArith = {{"add", ArithOp::Add}, {"sub", ArithOp::Sub}, {"mul", ArithOp::Mul}};
    static const std::map<std::string, Width> kWidth = {{"u8", Width::W8}, {"u16", Width::W16}, {"u32", Width::W32}};
    auto us = name.find('_');
    if (us != std::string::npos) {
      auto a = kArith.find(name.substr(0, us));
      auto w = kWidth.find(name.substr(us + 1));
      if (a != kArith.end() && w != kWidth.end()) {
        e.kind = ExprKind::ModArith;
        e.arith = a->second;
        e.width = w->second;
        return e;
      }
    }
    if (name == "get_ms_tick") {
      e.kind = ExprKind::Tick;
    } else if (name == "since") {
      e.kind = ExprKind::Since;
    } else {
      e.kind = ExprKind::Call;
    }
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

struct Line {
  int number = 0;
  int indent = 0;
  std::string text;  // comment-stripped, trimmed
};

enum class Section { None, Constants, Inputs, Outputs, State, Init, Logic };

class ProgramParser {
 public:
  ProgramParser(std::string_view source, IoConfig io) : source_(source) { program_.io = io; }

  CyclicProgram run() {
    Section section = Section::None;
    std::vector<Line> init_lines;
    std::vector<Line> logic_lines;
    std::map<Section, bool> seen;
    int number = 0;
    for (const auto& raw : text::lines(source_)) {
      ++number;
      std::string_view body = raw;
      if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
      if (text::trim(body).empty()) continue;
      if (body.find('\t') != std::string_view::npos) {
        error(number, static_cast<int>(body.find('\t')) + 1, "tab characters are not allowed; indent with spaces");
        continue;
      }
      int indent = 0;
      while (indent < static_cast<int>(body.size()) && body[static_cast<std::size_t>(indent)] == ' ') ++indent;
      std::string content(text::trim(body));
      if (indent == 0) {
        static const std::map<std::string, Section> kSections = {
            {"CONSTANTS", Section::Constants}, {"INPUTS", Section::Inputs}, {"OUTPUTS", Section::Outputs},
            {"STATE", Section::State},         {"INIT", Section::Init},     {"LOGIC", Section::Logic}};
        auto it = kSections.find(content);
        if (it == kSections.end()) {
          error(number, 1, "expected a section header, found '" + content + "'");
          section = Section::None;
          continue;
        }
        if (seen[it->second]) error(number, 1, "duplicate section " + content);
        seen[it->second] = true;
        section = it->second;
        continue;
      }
      Line line{number, indent, content};
      switch (section) {
        case Section::None: error(number, indent + 1, "content outside of any section"); break;
        case Section::Constants: declaration(line, VarKind::Constant); break;
        case Section::Inputs: declaration(line, VarKind::Input); break;
        case Section::Outputs: declaration(line, VarKind::Output); break;
        case Section::State: declaration(line, VarKind::State); break;
        case Section::Init: init_lines.push_back(std::move(line)); break;
        case Section::Logic: logic_lines.push_back(std::move(line)); break;
      }
    }
    program_.init = block(init_lines);
    program_.logic = block(logic_lines);
    if (!diags_.empty()) throw ParseError(std::move(diags_));
    return std::move(program_);
  }

 private:
  void error(int line, int col, std::string msg) { diags_.push_back({"E_SYNTAX", line, col, std::move(msg)}); }

  // name : type [= value] [@ pin]
  void declaration(const Line& line, VarKind kind) {
    try {
      auto toks = tokenize(line.text, line.indent + 1);
      std::size_t p = 0;
      auto expect = [&](bool ok, const std::string& what) {
        if (!ok) throw SyntaxError(toks[p].col, "expected " + what);
      };
      expect(toks[p].kind == Tok::Ident, "a name");
      VarDecl d;
      d.name = toks[p].text;
      d.kind = kind;
      d.loc = {line.number, toks[p].col};
      ++p;
      expect(toks[p].kind == Tok::Op && toks[p].text == ":", "':'");
      ++p;
      expect(toks[p].kind == Tok::Ident, "a type name");
      d.type_spelling = toks[p].text;
      d.type = parse_type_name(d.type_spelling);
      ++p;
      if (toks[p].kind == Tok::Op && (toks[p].text == "=" || toks[p].text == ":=")) {
        ++p;
        if (toks[p].kind == Tok::Number) {
          d.init = toks[p].number;
        } else if (toks[p].kind == Tok::Ident && toks[p].text == "IO_ON") {
          d.init = kIoOn;
        } else if (toks[p].kind == Tok::Ident && toks[p].text == "IO_OFF") {
          d.init = kIoOff;
        } else {
          expect(false, "a literal value");
        }
        d.has_init = true;
        ++p;
      }
      if (toks[p].kind == Tok::Op && toks[p].text == "@") {
        ++p;
        expect(toks[p].kind == Tok::Number, "a pin number");
        d.pin = static_cast<int>(toks[p].number);
        ++p;
      }
      expect(toks[p].kind == Tok::End, "end of declaration");
      program_.decls.push_back(std::move(d));
    } catch (const SyntaxError& e) {
      error(line.number, e.col, e.msg);
    }
  }

  std::vector<Stmt> block(const std::vector<Line>& lines) {
    std::size_t pos = 0;
    std::vector<Stmt> out;
    if (lines.empty()) return out;
    int indent = lines.front().indent;
    while (pos < lines.size()) {
      if (lines[pos].indent != indent) {
        error(lines[pos].number, lines[pos].indent + 1, "inconsistent indentation");
        ++pos;
        continue;
      }
      statement(lines, pos, out);
    }
    return out;
  }

  // Parses statements at exactly `indent` until a shallower line.
  std::vector<Stmt> nested(const std::vector<Line>& lines, std::size_t& pos, int parent_indent, int header_line) {
    std::vector<Stmt> out;
    if (pos >= lines.size() || lines[pos].indent <= parent_indent) {
      error(header_line, parent_indent + 1, "empty block");
      return out;
    }
    int indent = lines[pos].indent;
    while (pos < lines.size() && lines[pos].indent > parent_indent) {
      if (lines[pos].indent != indent) {
        error(lines[pos].number, lines[pos].indent + 1, "inconsistent indentation");
        ++pos;
        continue;
      }
      statement(lines, pos, out);
    }
    return out;
  }

  void statement(const std::vector<Line>& lines, std::size_t& pos, std::vector<Stmt>& out) {
    const Line& line = lines[pos++];
    try {
      auto toks = tokenize(line.text, line.indent + 1);
      SourceLoc loc{line.number, line.indent + 1};
      if (is_keyword_op(toks[0], "if")) {
        Stmt s;
        s.kind = StmtKind::If;
        s.loc = loc;
        std::vector<Token> cond(toks.begin() + 1, toks.end() - 1);
        if (!cond.empty() && is_keyword_op(cond.back(), "then")) cond.pop_back();
        if (cond.empty()) throw SyntaxError(toks[0].col, "missing condition");
        cond.push_back(toks.back());
        s.cond = ExprParser(std::move(cond), line.number).parse_full();
        s.then_body = nested(lines, pos, line.indent, line.number);
        if (pos < lines.size() && lines[pos].indent == line.indent && is_else(lines[pos].text)) {
          int else_line = lines[pos].number;
          ++pos;
          s.else_body = nested(lines, pos, line.indent, else_line);
        }
        out.push_back(std::move(s));
        return;
      }
      if (is_else(line.text)) throw SyntaxError(line.indent + 1, "'else' without matching 'if'");
      if (is_keyword_op(toks[0], "local")) {
        if (toks[1].kind != Tok::Ident) throw SyntaxError(toks[1].col, "expected a local name");
        VarDecl d;
        d.name = toks[1].text;
        d.kind = VarKind::Local;
        d.loc = {line.number, toks[1].col};
        std::size_t p = 2;
        if (toks[p].kind == Tok::Op && toks[p].text == ":") {
          ++p;
          if (toks[p].kind != Tok::Ident) throw SyntaxError(toks[p].col, "expected a type name");
          d.type_spelling = toks[p].text;
          d.type = parse_type_name(d.type_spelling);
          ++p;
        }
        if (toks[p].kind != Tok::End) throw SyntaxError(toks[p].col, "unexpected '" + toks[p].text + "'");
        Stmt s;
        s.kind = StmtKind::Local;
        s.loc = d.loc;
        s.target = d.name;
        program_.decls.push_back(std::move(d));
        out.push_back(std::move(s));
        return;
      }
      if (toks[0].kind == Tok::Ident && toks[1].kind == Tok::Op && toks[1].text == ":=") {
        Stmt s;
        s.kind = StmtKind::Assign;
        s.loc = {line.number, toks[0].col};
        s.target = toks[0].text;
        std::vector<Token> rhs(toks.begin() + 2, toks.end());
        if (rhs.size() <= 1) throw SyntaxError(toks[1].col, "missing right-hand side");
        s.value = ExprParser(std::move(rhs), line.number).parse_full();
        out.push_back(std::move(s));
        return;
      }
      throw SyntaxError(line.indent + 1, "expected a statement ('if', 'local' or an assignment)");
    } catch (const SyntaxError& e) {
      error(line.number, e.col, e.msg);
      // Skip any block owned by the broken line.
      while (pos < lines.size() && lines[pos].indent > line.indent) ++pos;
    }
  }

  static bool is_else(std::string_view text) {
    auto w = text::words(text);
    return w.size() == 1 && (w[0] == "else" || w[0] == "ELSE");
  }

  std::string_view source_;
  CyclicProgram program_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

CyclicProgram parse_program(std::string_view source, IoConfig io) { return ProgramParser(source, io).run(); }

Expr parse_expression(std::string_view source) {
  try {
    return ExprParser(tokenize(source, 1), 1).parse_full();
  } catch (const SyntaxError& e) {
    throw ParseError({{"E_SYNTAX", 1, e.col, e.msg}});
  }
}

}  // namespace vigil::kernel
