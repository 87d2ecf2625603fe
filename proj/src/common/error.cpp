#include "vigil/common/error.hpp"

namespace vigil {

std::string format_diagnostic(const Diagnostic& d) {
  return d.code + " " + std::to_string(d.line) + ":" + std::to_string(d.col) + " " + d.message;
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "\n";
    out += format_diagnostic(d);
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(diagnostics.empty() ? "E_PARSE" : diagnostics.front().code, summarize(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace vigil
