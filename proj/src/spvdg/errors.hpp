#pragma once

#include <stdexcept>
#include <string>

namespace spvdg {

enum class ErrorKind {
  NoBracket,
  OffCurve,
  SingularJacobian,
  NoConvergence,
  InfeasibleOperatingPoint,
  InfeasibleReferences,
  DegenerateDenominator,
  NonFinite,
  NeverSettles,
  BadConfig,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace spvdg
