// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_ERROR_HPP_
#define CASTID_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace castid {

// Every failure the library reports carries one of these codes. The CLI maps
// them onto process exit codes (see exit_code_for).
enum class Errc {
  // ingest
  kMissingFile,
  kDimMismatch,
  kDuplicateCharacter,
  kParseError,
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedFile,
  kNonFiniteValue,
  kIoError,
  kPreconditionViolation,
  kUnknownTrackId,
  kFrameIndexOutOfRange,
  // imageops
  kBadLimits,
  kAlreadyGray,
  // dsp
  kTooShort,
  // descriptors
  kEmptyTrack,
  kZeroVector,
  // svm
  kSingleClass,
  kEmptyClass,
  // selection
  kBadFraction,
  // asv
  kEvenWindow,
  kMissingAsvScores,
  // pipeline
  kUncoveredCastEntry,
  kEmptyConfidentSet,
  kNoTrainSegments,
  kStageOrder,
  kLocked,
  // eval
  kMissingPrediction,
  kEmptyCurve,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// 0 success; 1 usage; 2 missing input; 3 validation; 4 stage failure.
int exit_code_for(Errc code);

}  // namespace castid

#endif  // CASTID_ERROR_HPP_
