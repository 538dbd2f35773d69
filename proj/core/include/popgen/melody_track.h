/**
 * @file melody_track.h
 * @brief Monophonic step sequences on the 16th-note grid.
 */

#ifndef POPGEN_MELODY_TRACK_H
#define POPGEN_MELODY_TRACK_H

#include <cstdint>
#include <string>
#include <vector>

namespace popgen {

inline constexpr int kStepsPerBeat = 4;

struct Meter {
  int beats_per_bar = 4;

  int steps_per_bar() const { return beats_per_bar * kStepsPerBeat; }
  bool operator==(const Meter&) const = default;
};

/// One 16th-note step: a MIDI pitch onset, a rest, or a continuation.
class StepState {
 public:
  enum class Kind : uint8_t { Pitch, Silence, Sustain };

  static StepState pitch(int midi);  ///< Throws InvalidParams outside [0, 127].
  static constexpr StepState silence() { return StepState(Kind::Silence, 0); }
  static constexpr StepState sustain() { return StepState(Kind::Sustain, 0); }

  Kind kind() const { return kind_; }
  bool is_pitch() const { return kind_ == Kind::Pitch; }
  bool is_silence() const { return kind_ == Kind::Silence; }
  bool is_sustain() const { return kind_ == Kind::Sustain; }
  /// Only meaningful when is_pitch().
  int midi() const { return midi_; }

  bool operator==(const StepState&) const = default;

 private:
  constexpr StepState(Kind kind, uint8_t midi) : kind_(kind), midi_(midi) {}

  Kind kind_ = Kind::Silence;
  uint8_t midi_ = 0;
};

/// Melody line; every generated voice uses this type.
struct MelodyTrack {
  std::vector<StepState> steps;
  Meter meter;

  int length() const { return static_cast<int>(steps.size()); }
  int bar_count() const;
  bool operator==(const MelodyTrack&) const = default;
};

/// Throws Error(InvariantViolation) if the track breaks a MelodyTrack invariant.
void validate(const MelodyTrack& track);
bool is_valid(const MelodyTrack& track);

/// Step indices of every pitch onset.
std::vector<int> onset_steps(const MelodyTrack& track);
int onset_count(const MelodyTrack& track);
/// Steps covered by the note starting at `onset` (onset plus trailing sustains).
int note_length(const MelodyTrack& track, int onset);
/// Pitch sounding at `step`, or -1 during silence.
int sounding_pitch(const MelodyTrack& track, int step);

/// Compact text form: pitches as numbers, '-' sustain, '.' silence.
std::string to_string(const MelodyTrack& track);
MelodyTrack track_from_string(const std::string& text, Meter meter = {});

}  // namespace popgen

#endif  // POPGEN_MELODY_TRACK_H
