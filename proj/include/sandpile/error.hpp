#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sandpile {

enum class Errc {
  UnknownVertex,
  Disconnected,
  InvalidMultiplicity,
  DuplicateEdge,
  Overflow,
  SizeMismatch,
  NotUnstable,
  NotStable,
  NotRecurrent,
  CapExceeded,
  IterationCap,
  NotATree,
  ModulusMismatch,
  ParseError,
  BadParameters,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::Disconnected: return "Disconnected";
    case Errc::InvalidMultiplicity: return "InvalidMultiplicity";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::Overflow: return "Overflow";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::NotUnstable: return "NotUnstable";
    case Errc::NotStable: return "NotStable";
    case Errc::NotRecurrent: return "NotRecurrent";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::IterationCap: return "IterationCap";
    case Errc::NotATree: return "NotATree";
    case Errc::ModulusMismatch: return "ModulusMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::BadParameters: return "BadParameters";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sandpile
