#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pimmmu {

// Configuration or descriptor validation failure; carries every failing field.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "; ";
      out += e;
    }
    return out;
  }

  std::vector<std::string> errors_;
};

// The simulation could not continue (protocol violation, deadlock).
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Prefixes each message with `scope.`.
inline void append_scoped(std::vector<std::string>& out, const std::string& scope,
                          const std::vector<std::string>& errors) {
  for (const auto& e : errors) out.push_back(scope + "." + e);
}

}  // namespace pimmmu
