#include "gkcp/error.hpp"

namespace gkcp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::all_points_identical: return "AllPointsIdentical";
    case ErrorCode::non_finite_kernel: return "NonFiniteKernel";
    case ErrorCode::degenerate_split: return "DegenerateSplit";
    case ErrorCode::zero_variance: return "ZeroVariance";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::data_format: return "DataFormatError";
    case ErrorCode::config: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace gkcp
