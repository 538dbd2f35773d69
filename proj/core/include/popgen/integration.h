/**
 * @file integration.h
 * @brief Two-hand piano arrangement: harmonic line in the left hand,
 *        per-bar choice of secondary or simplified line in the right hand,
 *        then column-chord embellishment.
 */

#ifndef POPGEN_INTEGRATION_H
#define POPGEN_INTEGRATION_H

#include <cstdint>
#include <vector>

#include "popgen/chord.h"
#include "popgen/melody_track.h"

namespace popgen {

/// One sounding pitch at a step of a polyphonic track.
struct PolyEvent {
  int midi = 60;
  bool onset = true;  ///< false: continuation of the same pitch from the previous step

  bool operator==(const PolyEvent&) const = default;
};

struct PolyTrack {
  std::vector<std::vector<PolyEvent>> steps;
  Meter meter;

  int length() const { return static_cast<int>(steps.size()); }
  bool operator==(const PolyTrack&) const = default;
};

/// Monophonic track as a single-voice PolyTrack.
PolyTrack to_poly(const MelodyTrack& track);
/// Throws InvariantViolation on duplicate pitches or dangling continuations.
void validate(const PolyTrack& track);

enum class RightHandSource { Secondary, Simplified };

struct ColumnChordPolicy {
  double w_pitch = 0.3;
  double w_metric = 0.5;
  double bias = 0.0;
  int max_added_notes = 2;
  uint64_t seed = 0;
  int range_low = 48;  ///< pitch normalization range
  int range_high = 84;

  bool operator==(const ColumnChordPolicy&) const = default;
};

struct Arrangement {
  MelodyTrack lead;
  PolyTrack right_hand;
  MelodyTrack left_hand;
  ChordTimeline chords;
  Meter meter;
  std::vector<RightHandSource> bar_sources;
};

/// Throws InvariantViolation when a track is invalid or lengths disagree.
void validate(const Arrangement& arrangement);

/// -(mean |interval| between consecutive onsets in the bar); 0 with fewer than 2 onsets.
double bar_smoothness(const MelodyTrack& track, int bar);

/// Secondary where bar_smoothness(lead, bar) > tau, simplified elsewhere.
std::vector<RightHandSource> choose_right_hand_sources(const MelodyTrack& lead, double tau);

/// Copies each bar from the chosen source; a bar that opens on a sustain of
/// a note the output does not hold gets a fresh onset of that note.
MelodyTrack assemble_right_hand(const MelodyTrack& lead, const MelodyTrack& secondary,
                                const MelodyTrack& simplified, double tau);

/// bar start 1.0, beat 0.75, eighth 0.5, sixteenth 0.25.
double metric_strength(int step, Meter meter = {});
/// clamp(bias + w_pitch * pitch_norm + w_metric * metric_strength, 0, 1).
double column_chord_probability(int midi, int step, const ColumnChordPolicy& policy, Meter meter = {});

/// Accepted onsets gain up to max_added_notes chord tones of the active chord
/// strictly inside (pitch - 12, pitch), highest first, held as long as the melody note.
PolyTrack add_column_chords(const MelodyTrack& track, const ChordTimeline& chords, const ColumnChordPolicy& policy);

Arrangement integrate(const MelodyTrack& lead, const MelodyTrack& secondary, const MelodyTrack& simplified,
                      const MelodyTrack& harmonic, const ChordTimeline& chords, double tau,
                      const ColumnChordPolicy& policy);

}  // namespace popgen

#endif  // POPGEN_INTEGRATION_H
