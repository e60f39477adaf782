#pragma once

#include <stdexcept>
#include <string>

namespace qb {

// Failure kinds surfaced by the library. The CLI maps schema/config kinds
// to exit code 2 and the mathematical domain kinds to exit code 3.
enum class errc {
  empty_measure,
  nonpositive_atom,
  mass_deviation,
  log_convexity_violation,
  invalid_quantile_level,
  nonpositive_argument,
  nonpositive_tolerance,
  moment_inconsistency,
  invalid_order,
  invalid_config,
  schema_violation,
};

const char* errc_name(errc code) noexcept;

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw error(code, std::string(errc_name(code)) + ": " + what);
}

}  // namespace qb
