#include "lift/common/error.hpp"

#include <utility>

namespace lift {

Error::Error(ErrorCategory category, std::string kind, const std::string& message)
    : std::runtime_error(kind + ": " + message), category_(category), kind_(std::move(kind)) {}

void throw_config(std::string kind, const std::string& message) {
  throw Error(ErrorCategory::Config, std::move(kind), message);
}

void throw_data(std::string kind, const std::string& message) {
  throw Error(ErrorCategory::Data, std::move(kind), message);
}

void throw_numeric(std::string kind, const std::string& message) {
  throw Error(ErrorCategory::Numeric, std::move(kind), message);
}

int exit_code_for(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numeric: return 4;
  }
  return 1;
}

}  // namespace lift
