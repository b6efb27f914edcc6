// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "castid/error.hpp"

namespace castid {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMissingFile: return "MissingFile";
    case Errc::kDimMismatch: return "DimMismatch";
    case Errc::kDuplicateCharacter: return "DuplicateCharacter";
    case Errc::kParseError: return "ParseError";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kUnsupportedVersion: return "UnsupportedVersion";
    case Errc::kTruncatedFile: return "TruncatedFile";
    case Errc::kNonFiniteValue: return "NonFiniteValue";
    case Errc::kIoError: return "IoError";
    case Errc::kPreconditionViolation: return "PreconditionViolation";
    case Errc::kUnknownTrackId: return "UnknownTrackId";
    case Errc::kFrameIndexOutOfRange: return "FrameIndexOutOfRange";
    case Errc::kBadLimits: return "BadLimits";
    case Errc::kAlreadyGray: return "AlreadyGray";
    case Errc::kTooShort: return "TooShort";
    case Errc::kEmptyTrack: return "EmptyTrack";
    case Errc::kZeroVector: return "ZeroVector";
    case Errc::kSingleClass: return "SingleClass";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kBadFraction: return "BadFraction";
    case Errc::kEvenWindow: return "EvenWindow";
    case Errc::kMissingAsvScores: return "MissingAsvScores";
    case Errc::kUncoveredCastEntry: return "UncoveredCastEntry";
    case Errc::kEmptyConfidentSet: return "EmptyConfidentSet";
    case Errc::kNoTrainSegments: return "NoTrainSegments";
    case Errc::kStageOrder: return "StageOrder";
    case Errc::kLocked: return "Locked";
    case Errc::kMissingPrediction: return "MissingPrediction";
    case Errc::kEmptyCurve: return "EmptyCurve";
  }
  return "Unknown";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kMissingFile:
      return 2;
    case Errc::kDimMismatch:
    case Errc::kDuplicateCharacter:
    case Errc::kParseError:
    case Errc::kBadMagic:
    case Errc::kUnsupportedVersion:
    case Errc::kTruncatedFile:
    case Errc::kNonFiniteValue:
    case Errc::kPreconditionViolation:
    case Errc::kUnknownTrackId:
    case Errc::kFrameIndexOutOfRange:
    case Errc::kBadLimits:
    case Errc::kAlreadyGray:
    case Errc::kTooShort:
    case Errc::kBadFraction:
    case Errc::kEvenWindow:
    case Errc::kMissingPrediction:
    case Errc::kEmptyCurve:
      return 3;
    default:
      return 4;
  }
}

}  // namespace castid
