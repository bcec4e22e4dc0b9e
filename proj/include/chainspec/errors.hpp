#pragma once

#include <stdexcept>
#include <string>

namespace chainspec {

// Base of every error raised by the library. The `kind()` tag is stable and
// appears verbatim in CLI reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CHAINSPEC_ERROR(Name)                                      \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

CHAINSPEC_ERROR(GrammarError);
CHAINSPEC_ERROR(ContextInadmissible);
CHAINSPEC_ERROR(InadmissibleWord);
CHAINSPEC_ERROR(WindowTooShort);
CHAINSPEC_ERROR(PositivityViolated);
CHAINSPEC_ERROR(OrderConsistencyViolated);
CHAINSPEC_ERROR(ZeroDenominator);
CHAINSPEC_ERROR(TailNotSummable);
CHAINSPEC_ERROR(SpreadNotContracting);
CHAINSPEC_ERROR(BudgetExceeded);
CHAINSPEC_ERROR(NotIrreducible);
CHAINSPEC_ERROR(InadmissibleContext);
CHAINSPEC_ERROR(Unsupported);
CHAINSPEC_ERROR(ConfigError);

#undef CHAINSPEC_ERROR

}  // namespace chainspec
