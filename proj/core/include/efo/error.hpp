#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace efo {

/// Failure categories surfaced by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  MaskedAction,
  TerminalState,
  Distribution,
  Configuration,
  Encoding,
  Classification,
  DegenerateDiscount,
  Shape,
  Taxonomy,
  Capability,
  Divergence,
  ArtifactFormat,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace efo
