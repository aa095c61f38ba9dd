#include "gkcp/sequence.hpp"

#include <string>

#include "gkcp/error.hpp"

namespace gkcp {

Sequence::Sequence(RowMatrix values) : values_(std::move(values)) {
  if (values_.rows() < 4) {
    throw Error(ErrorCode::invalid_argument,
                "sequence needs at least 4 observations, got " + std::to_string(values_.rows()));
  }
  if (values_.cols() < 1) {
    throw Error(ErrorCode::invalid_argument, "sequence has no coordinates");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "sequence contains non-finite values");
  }
}

Sequence Sequence::slice(Index begin, Index end) const {
  if (begin < 0 || end > n() || begin >= end) {
    throw Error(ErrorCode::invalid_argument, "invalid sequence slice");
  }
  return Sequence(values_.middleRows(begin, end - begin));
}

}  // namespace gkcp
