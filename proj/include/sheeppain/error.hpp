#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sheeppain {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
  validation,  // malformed input or violated invariant
  numerical,   // non-finite value produced or supplied
  oracle,      // implementation disagrees with its reference
  io,          // file could not be opened / written
};

std::string_view kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt,
        std::string field = {})
      : std::runtime_error(message),
        kind_(kind),
        line_(line),
        field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// 1-based input line, when the error came from a line-oriented stream.
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace sheeppain
