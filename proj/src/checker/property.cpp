#include "vigil/checker/property.hpp"

#include <cctype>
#include <set>

#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::checker {

namespace {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view s) : s_(s) {}

  Formula parse() {
    Formula f = implies();
    skip();
    if (p_ != s_.size()) fail("unexpected '" + std::string(s_.substr(p_, 1)) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("E_SYNTAX", msg + " at column " + std::to_string(p_ + 1));
  }

  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(p_, tok.size()) != tok) return false;
    // keywords must not run into an identifier
    if (std::isalpha(static_cast<unsigned char>(tok[0])) && p_ + tok.size() < s_.size() &&
        (std::isalnum(static_cast<unsigned char>(s_[p_ + tok.size()])) || s_[p_ + tok.size()] == '_')) {
      return false;
    }
    p_ += tok.size();
    return true;
  }

  static Formula node(Formula::Kind k, Formula a, Formula b) {
    Formula f;
    f.kind = k;
    f.args.push_back(std::move(a));
    f.args.push_back(std::move(b));
    return f;
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (eat("=>")) return node(Formula::Kind::Implies, std::move(lhs), implies());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (eat("|") || eat("or")) lhs = node(Formula::Kind::Or, std::move(lhs), conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (eat("&") || eat("and")) lhs = node(Formula::Kind::And, std::move(lhs), unary());
    return lhs;
  }

  Formula unary() {
    if (eat("!") || eat("not")) {
      Formula f;
      f.kind = Formula::Kind::Not;
      f.args.push_back(unary());
      return f;
    }
    if (eat("(")) {
      Formula f = implies();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    if (eat("true")) return {};
    if (eat("false")) {
      Formula f;
      f.kind = Formula::Kind::False;
      return f;
    }
    std::string name = word();
    if (name.empty()) fail("expected a register, true, false, '!' or '('");
    Formula f;
    f.kind = Formula::Kind::Atom;
    f.var = name;
    f.value = kernel::kIoOn;
    if (eat("!=")) {
      f.equal = false;
    } else if (skip(), s_.substr(p_, 2) == "=>" || !eat("=")) {
      return f;
    }
    skip();
    std::string v = word();
    if (v == "ON" || v == "IO_ON") {
      f.value = kernel::kIoOn;
    } else if (v == "OFF" || v == "IO_OFF") {
      f.value = kernel::kIoOff;
    } else if (auto n = text::parse_uint(v); n && *n <= 0xFFFFFFFFu) {
      f.value = static_cast<std::uint32_t>(*n);
    } else {
      fail("expected ON, OFF or a number after '" + name + (f.equal ? " ='" : " !='"));
    }
    return f;
  }

  std::string word() {
    skip();
    std::size_t start = p_;
    while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
    return std::string(s_.substr(start, p_ - start));
  }

  std::string_view s_;
  std::size_t p_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

std::vector<Property> parse_properties(std::string_view src) {
  std::vector<Property> out;
  std::vector<Diagnostic> diags;
  std::set<std::string> names;
  int number = 0;
  for (const auto& raw : text::lines(src)) {
    ++number;
    std::string body(text::trim(std::string_view(raw).substr(0, raw.find('#'))));
    if (body.empty()) continue;
    auto colon = body.find(':');
    if (colon == std::string::npos) {
      diags.push_back({"E_SYNTAX", number, 1, "expected 'name: formula'"});
      continue;
    }
    Property p;
    p.name = std::string(text::trim(std::string_view(body).substr(0, colon)));
    p.text = std::string(text::trim(std::string_view(body).substr(colon + 1)));
    p.line = number;
    if (!text::is_identifier(p.name)) {
      diags.push_back({"E_SYNTAX", number, 1, "bad property name '" + p.name + "'"});
      continue;
    }
    if (!names.insert(p.name).second) {
      diags.push_back({"E_DUPLICATE_NAME", number, 1, "property '" + p.name + "' defined twice"});
      continue;
    }
    try {
      p.formula = parse_formula(p.text);
    } catch (const Error& e) {
      diags.push_back({e.code(), number, static_cast<int>(colon) + 2, e.what()});
      continue;
    }
    out.push_back(std::move(p));
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return out;
}

std::string format_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Atom: {
      std::string v = f.value == kernel::kIoOn ? "ON" : f.value == kernel::kIoOff ? "OFF" : std::to_string(f.value);
      return f.var + (f.equal ? " = " : " != ") + v;
    }
    case Formula::Kind::Not: return "!(" + format_formula(f.args[0]) + ")";
    case Formula::Kind::And: return "(" + format_formula(f.args[0]) + " & " + format_formula(f.args[1]) + ")";
    case Formula::Kind::Or: return "(" + format_formula(f.args[0]) + " | " + format_formula(f.args[1]) + ")";
    case Formula::Kind::Implies: return "(" + format_formula(f.args[0]) + " => " + format_formula(f.args[1]) + ")";
  }
  return "?";
}

void bind(Formula& f, const kernel::CyclicProgram& program) {
  if (f.kind == Formula::Kind::Atom) {
    int i = program.find(f.var);
    if (i < 0 || program.decls[static_cast<std::size_t>(i)].kind == kernel::VarKind::Local) {
      throw Error("E_UNKNOWN_NAME", "property reads '" + f.var + "', which is not a register of the program");
    }
    f.index = i;
  }
  for (auto& a : f.args) bind(a, program);
}

bool holds(const Formula& f, const kernel::CyclicProgram& program, const kernel::VarStore& store) {
  switch (f.kind) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: {
      int i = f.index >= 0 ? f.index : program.find(f.var);
      std::uint32_t v = store[static_cast<std::size_t>(i)];
      return (v == f.value) == f.equal;
    }
    case Formula::Kind::Not: return !holds(f.args[0], program, store);
    case Formula::Kind::And: return holds(f.args[0], program, store) && holds(f.args[1], program, store);
    case Formula::Kind::Or: return holds(f.args[0], program, store) || holds(f.args[1], program, store);
    case Formula::Kind::Implies: return !holds(f.args[0], program, store) || holds(f.args[1], program, store);
  }
  return false;
}

}  // namespace vigil::checker
