#pragma once

// Command-line front end. run() is the whole program minus process setup so
// that tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

#include "chainspec/certified.hpp"

namespace chainspec {

// One line of a report. Real-valued fields carry a radius or the tag
// "exact"; integers are counts and always exact.
class Record {
 public:
  explicit Record(std::string type) : type_(std::move(type)) {}
  Record& text(const std::string& key, const std::string& value);
  Record& integer(const std::string& key, long long value);
  Record& flag(const std::string& key, bool value);
  Record& exact(const std::string& key, double value);
  Record& real(const std::string& key, double value, double radius, bool sampled = false);
  Record& certified(const std::string& key, const CertifiedValue& v);

  const std::string& type() const noexcept { return type_; }
  // machine: "record=<type> key=value ..." with %.17g reals
  std::string machine() const;
  // text: "<type>: key value ..." with rounded reals
  std::string human() const;

 private:
  struct Field {
    std::string key, machine, human;
  };
  std::string type_;
  std::vector<Field> fields_;
};

// Exit codes of run().
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;   // a checked assertion failed
constexpr int kExitInput = 2;  // bad input, inapplicable command or budget error

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chainspec
