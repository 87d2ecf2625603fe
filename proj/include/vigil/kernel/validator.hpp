#pragma once

#include <map>
#include <string>
#include <vector>

#include "vigil/common/error.hpp"
#include "vigil/kernel/program.hpp"

namespace vigil::kernel {

// Verification rule numbers reported with each error.
inline constexpr int kRowSpecTyping = 1;
inline constexpr int kRowImplTyping = 3;
inline constexpr int kRowOverflowOp = 6;
inline constexpr int kRowMultiCond = 7;
inline constexpr int kRowUntypedLocal = 8;

struct ValidationError {
  int row = 0;
  std::string code;  // E_TYPE, E_OVERFLOW_OP, E_MULTI_COND, E_UNTYPED_LOCAL
  SourceLoc loc;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationError> errors;
  std::map<std::string, ScalarType> local_types;  // declared or inferred

  bool ok() const { return errors.empty(); }
  bool has(std::string_view code) const;
  /// One `ROW<k> <code> <line>:<col> <message>` record per line.
  std::string to_string() const;
};

ValidationReport validate(const CyclicProgram& program);

class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Validates, fixes local types and assigns pins to unpinned I/O.
/// Every downstream consumer (interpreter, compilers, checker) expects a
/// prepared program. Throws ValidationFailure.
CyclicProgram prepare(CyclicProgram program);

}  // namespace vigil::kernel
