#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vigil {

/// Exception carrying a stable machine-readable code such as "E_UPLOAD_CRC".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct Diagnostic {
  std::string code;
  int line = 0;
  int col = 0;
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

/// Raised by the text front ends; holds every problem found, not just the first.
class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace vigil
