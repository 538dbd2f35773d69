/**
 * @file melody_track.cpp
 * @brief MelodyTrack invariants and helpers.
 */

#include "popgen/melody_track.h"

#include <sstream>

#include "popgen/error.h"

namespace popgen {

StepState StepState::pitch(int midi) {
  if (midi < 0 || midi > 127) {
    throw Error(ErrorCode::InvalidParams, "MIDI pitch out of range: " + std::to_string(midi));
  }
  return StepState(Kind::Pitch, static_cast<uint8_t>(midi));
}

int MelodyTrack::bar_count() const {
  const int per_bar = meter.steps_per_bar();
  return (length() + per_bar - 1) / per_bar;
}

void validate(const MelodyTrack& track) {
  if (track.steps.empty()) throw Error(ErrorCode::InvariantViolation, "melody track is empty");
  if (track.meter.beats_per_bar < 1) throw Error(ErrorCode::InvariantViolation, "meter needs >= 1 beat");
  if (track.steps.front().is_sustain()) {
    throw Error(ErrorCode::InvariantViolation, "melody track starts with sustain");
  }
  for (std::size_t i = 1; i < track.steps.size(); ++i) {
    if (track.steps[i].is_sustain() && track.steps[i - 1].is_silence()) {
      throw Error(ErrorCode::InvariantViolation, "sustain after silence at step " + std::to_string(i));
    }
  }
}

bool is_valid(const MelodyTrack& track) {
  try {
    validate(track);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<int> onset_steps(const MelodyTrack& track) {
  std::vector<int> out;
  for (int i = 0; i < track.length(); ++i) {
    if (track.steps[i].is_pitch()) out.push_back(i);
  }
  return out;
}

int onset_count(const MelodyTrack& track) { return static_cast<int>(onset_steps(track).size()); }

int note_length(const MelodyTrack& track, int onset) {
  int end = onset + 1;
  while (end < track.length() && track.steps[end].is_sustain()) ++end;
  return end - onset;
}

int sounding_pitch(const MelodyTrack& track, int step) {
  for (int i = step; i >= 0; --i) {
    const StepState& s = track.steps[i];
    if (s.is_pitch()) return s.midi();
    if (s.is_silence()) return -1;
  }
  return -1;
}

std::string to_string(const MelodyTrack& track) {
  std::ostringstream os;
  for (std::size_t i = 0; i < track.steps.size(); ++i) {
    if (i) os << ' ';
    const StepState& s = track.steps[i];
    if (s.is_pitch()) {
      os << s.midi();
    } else {
      os << (s.is_sustain() ? '-' : '.');
    }
  }
  return os.str();
}

MelodyTrack track_from_string(const std::string& text, Meter meter) {
  MelodyTrack track;
  track.meter = meter;
  std::istringstream is(text);
  std::string token;
  while (is >> token) {
    if (token == "-") {
      track.steps.push_back(StepState::sustain());
    } else if (token == ".") {
      track.steps.push_back(StepState::silence());
    } else {
      try {
        track.steps.push_back(StepState::pitch(std::stoi(token)));
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, "bad step token '" + token + "'");
      }
    }
  }
  return track;
}

}  // namespace popgen
