#pragma once

#include <stdexcept>
#include <string>

namespace lift {

/// Broad failure class; drives CLI exit codes (config 2, data 3, numeric 4).
enum class ErrorCategory { Config, Data, Numeric };

/// Every failure raised by the toolkit. `kind()` carries the specific
/// condition name (e.g. "MissingLandmark") so callers and tests can branch
/// on it without string-matching the message.
class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, std::string kind, const std::string& message);

  ErrorCategory category() const noexcept { return category_; }
  const std::string& kind() const noexcept { return kind_; }

private:
  ErrorCategory category_;
  std::string kind_;
};

[[noreturn]] void throw_config(std::string kind, const std::string& message);
[[noreturn]] void throw_data(std::string kind, const std::string& message);
[[noreturn]] void throw_numeric(std::string kind, const std::string& message);

int exit_code_for(ErrorCategory category) noexcept;

}  // namespace lift
