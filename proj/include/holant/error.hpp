#pragma once

#include <stdexcept>
#include <string>

namespace holant {

enum class Errc {
  invalid_argument,
  negative_entry,
  internal_zero,
  not_log_concave,
  infeasible_pinning,
  zero_probability_pinning,
  too_large,
  infeasible_start,
  precondition_violated,
  parse_error,
};

// Library-wide exception. `index` carries the offending position for
// signature validation errors, -1 otherwise.
class HolantError : public std::runtime_error {
public:
  HolantError(Errc code, const std::string& msg, int index = -1)
      : std::runtime_error(msg), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }
  int index() const noexcept { return index_; }

private:
  Errc code_;
  int index_;
};

}  // namespace holant
