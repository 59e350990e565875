#pragma once

#include <stdexcept>
#include <string>

namespace lrp {

enum class ErrorKind {
  kDomain,
  kValidation,
  kEmptyDelta,
  kOrderViolation,
  kInfiniteDelta,
  kZeroProduct,
  kSize,
  kBracketing,
  kFit,
  kInternalConsistency,
};

const char* to_string(ErrorKind kind);

/// Every error names the module and operation that raised it, e.g. "coupling.compute_q".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), kind_(kind), where_(std::move(where)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::string where_;
};

}  // namespace lrp
