/**
 * @file error.cpp
 * @brief Error code names.
 */

#include "popgen/error.h"

namespace popgen {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSymbol: return "MalformedSymbol";
    case ErrorCode::UnsupportedChordType: return "UnsupportedChordType";
    case ErrorCode::InvalidDegree: return "InvalidDegree";
    case ErrorCode::InvalidOffset: return "InvalidOffset";
    case ErrorCode::RootOrTypeMismatch: return "RootOrTypeMismatch";
    case ErrorCode::EmptyChord: return "EmptyChord";
    case ErrorCode::EmptyProgression: return "EmptyProgression";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::EmptyObservation: return "EmptyObservation";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AllSilence: return "AllSilence";
    case ErrorCode::LengthNotDivisible: return "LengthNotDivisible";
    case ErrorCode::BadLayerIndex: return "BadLayerIndex";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NonStationaryParams: return "NonStationaryParams";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::NotAnOnset: return "NotAnOnset";
    case ErrorCode::EmptyTrack: return "EmptyTrack";
    case ErrorCode::BarOutOfRange: return "BarOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DurationMismatch: return "DurationMismatch";
    case ErrorCode::NoFilesFound: return "NoFilesFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace popgen
