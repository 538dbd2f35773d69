/**
 * @file error.h
 * @brief Error codes and the exception type thrown by every popgen module.
 */

#ifndef POPGEN_ERROR_H
#define POPGEN_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace popgen {

enum class ErrorCode {
  // chord model
  MalformedSymbol,
  UnsupportedChordType,
  InvalidDegree,
  InvalidOffset,
  RootOrTypeMismatch,
  EmptyChord,
  // harmony HMM
  EmptyProgression,
  EmptyCorpus,
  UnknownState,
  EmptyObservation,
  InvalidModel,
  // signals and tracks
  LengthMismatch,
  AllSilence,
  LengthNotDivisible,
  BadLayerIndex,
  InvariantViolation,
  // SARMA
  NonStationaryParams,
  InvalidParams,
  ConstantSeries,
  SeriesTooShort,
  // quantizer / generators
  EmptyRange,
  EmptySamples,
  PeriodMismatch,
  NotAnOnset,
  EmptyTrack,
  // integration
  BarOutOfRange,
  // pipeline / io
  ParseError,
  DurationMismatch,
  NoFilesFound,
  IoError,
  ConfigError,
  FormatError,
};

std::string_view error_code_name(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace popgen

#endif  // POPGEN_ERROR_H
