#pragma once

#include <stdexcept>
#include <string>

namespace gkcp {

enum class ErrorCode {
  invalid_argument,
  all_points_identical,
  non_finite_kernel,
  degenerate_split,
  zero_variance,
  invalid_spec,
  data_format,
  config,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// front ends can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gkcp
