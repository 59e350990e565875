#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "lrp/errors.hpp"
#include "lrp/kernel.hpp"

namespace lrp {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitValidation = 2,
  kExitSize = 3,
  kExitBracketing = 4,
  kExitInternal = 5,
  kExitFit = 6,
};

int exit_code_for(ErrorKind kind);

/// Kernel from its config subtree: {family, d, orientation, params, overrides}.
Kernel parse_kernel(const nlohmann::json& spec);
nlohmann::json describe_kernel(const Kernel& k);

/// Seed from a JSON number or a decimal / 0x-prefixed hex string.
std::uint64_t parse_seed(const nlohmann::json& v);
std::uint64_t parse_seed(const std::string& s);

/// Checks the document against the schema of its command and fills defaults.
/// Unknown keys anywhere are rejected.
nlohmann::json validate_config(const nlohmann::json& config);

/// FNV-1a over the canonical config dump and the generator version, as 16 hex digits.
std::string config_digest(const nlohmann::json& canonical);

struct RunOptions {
  unsigned workers = 1;
  bool timing = false;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json document;
  std::optional<std::string> csv;
};

/// Validates and executes one experiment config. Errors are caught and reported in the
/// document with the matching exit code; nothing is computed on a validation error.
RunResult run_command(const nlohmann::json& config, const RunOptions& options = {});

}  // namespace lrp
