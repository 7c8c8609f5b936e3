#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracsp {

// Thrown for violated preconditions and failed numerical procedures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration rejected; carries every violated constraint.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace fracsp
