#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adic {

enum class ErrorKind {
  InvalidArgument,
  NotCoprime,
  VerificationFailed,
  NotInSubgroup,
  DegenerateDenominator,
  EpsilonTooCoarse,
  NoValidK,
  MultiplierDegenerate,
  DomainExhausted,
  SearchExhausted,
  BoundaryStraddle,
  OverlapError,
  ContainmentFailure,
  ScheduleError,
  NoContainingInterval,
  FactorizationLimit,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace adic
