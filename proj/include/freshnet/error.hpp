#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freshnet {

enum class Errc {
  invalid_argument,
  enumeration_cap_exceeded,
  unbounded_age,
  uncovered_link,
  unstable_queue,
  no_bracket,
  oracle_budget_exceeded,
  invalid_horizon,
  unknown_link,
  parse_error,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::enumeration_cap_exceeded: return "enumeration-cap-exceeded";
    case Errc::unbounded_age: return "unbounded-age";
    case Errc::uncovered_link: return "uncovered-link";
    case Errc::unstable_queue: return "unstable-queue";
    case Errc::no_bracket: return "no-bracket-found";
    case Errc::oracle_budget_exceeded: return "oracle-budget-exceeded";
    case Errc::invalid_horizon: return "invalid-horizon";
    case Errc::unknown_link: return "unknown-link";
    case Errc::parse_error: return "parse-error";
  }
  return "unknown";
}

}  // namespace freshnet
