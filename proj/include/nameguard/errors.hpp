#pragma once

#include <stdexcept>
#include <string>

namespace nameguard {

enum class ErrorKind {
  NotFound,
  Conflict,
  InvalidState,
  InvalidArgument,
  Domain,
  Parse,
  Io,
};

// Every failure that is not a verdict surfaces as an Error. `code` is a
// stable machine-readable token ("account_not_found", "term_exists", ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

}  // namespace nameguard
