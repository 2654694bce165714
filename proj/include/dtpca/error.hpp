#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtpca {

// Categories map one-to-one onto CLI exit codes.
enum class ErrorCategory {
  usage,    // bad arguments or out-of-range parameters (exit 1)
  data,     // unreadable or malformed input files (exit 2)
  numeric,  // numerical failure such as a zero-variance training set (exit 3)
};

constexpr std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::data: return "data";
    case ErrorCategory::numeric: return "numeric";
  }
  return "unknown";
}

constexpr int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::usage: return 1;
    case ErrorCategory::data: return 2;
    case ErrorCategory::numeric: return 3;
  }
  return 2;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& detail)
      : std::runtime_error(detail), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& detail) {
  throw Error(c, detail);
}

}  // namespace dtpca
