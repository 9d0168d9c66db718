// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace flocktrack {

enum class ErrorCode {
  kInput,                 // malformed file, bad config, missing path
  kDegenerateCovariance,  // innovation covariance numerically singular
  kEmptyCrop,             // box or patch clamped to zero area
  kEmptyGallery,
  kZeroVector,            // cosine distance of an all-zero histogram
  kEmptyGroundTruth,      // MOTA with no ground-truth objects
  kNoMatches,             // MOTP with no matched pairs
  kLayoutMissing,
  kConfig,
  kIo,
};

// All library failures are reported through this one exception type; the
// code lets the CLI map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Input-side failures map to CLI exit code 1, everything else to 2.
  bool is_input_error() const noexcept {
    return code_ == ErrorCode::kInput || code_ == ErrorCode::kConfig ||
           code_ == ErrorCode::kLayoutMissing;
  }

 private:
  ErrorCode code_;
};

}  // namespace flocktrack
