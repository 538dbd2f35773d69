/**
 * @file midi.h
 * @brief Standard MIDI File export of an arrangement and a small SMF reader.
 */

#ifndef POPGEN_MIDI_H
#define POPGEN_MIDI_H

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "popgen/integration.h"
#include "popgen/melody_track.h"

namespace popgen {

inline constexpr int kTicksPerQuarter = 480;
inline constexpr int kTicksPerStep = kTicksPerQuarter / kStepsPerBeat;
inline constexpr double kDefaultTempoBpm = 90.0;

struct MidiNote {
  int channel = 0;
  int pitch = 60;
  int velocity = 80;
  int64_t start_tick = 0;
  int64_t end_tick = 0;

  auto operator<=>(const MidiNote&) const = default;
};

struct MidiTrack {
  std::string name;
  std::vector<MidiNote> notes;  ///< sorted by (start, pitch)
};

struct MidiFile {
  int format = 1;
  int ticks_per_quarter = kTicksPerQuarter;
  double tempo_bpm = 120.0;  ///< first tempo event; 120 when absent
  int beats_per_bar = 4;     ///< first time signature; 4 when absent
  std::vector<MidiTrack> tracks;
};

/// Notes of a monophonic track on the given channel.
std::vector<MidiNote> track_notes(const MelodyTrack& track, int channel, int velocity);
std::vector<MidiNote> track_notes(const PolyTrack& track, int channel, int velocity);

/// Format 1, 480 PPQ; lead on channel 0 at velocity 80, right and left hand
/// on channels 1 and 2 at velocity 64. Tempo and metre live in the first track.
std::vector<uint8_t> render_midi(const Arrangement& arrangement, double tempo_bpm = kDefaultTempoBpm);
/// Single-track format 1 file holding one line (tempo and metre included).
std::vector<uint8_t> render_track_midi(const MelodyTrack& track, double tempo_bpm = kDefaultTempoBpm,
                                       int channel = 0, int velocity = 80);
/// Throws IoError.
void export_midi(const Arrangement& arrangement, const std::filesystem::path& path,
                 double tempo_bpm = kDefaultTempoBpm);

/// Throws FormatError on malformed data.
MidiFile parse_midi(std::span<const uint8_t> bytes);
MidiFile read_midi(const std::filesystem::path& path);

/// Highest sounding note wins per step; onsets snap to the nearest step.
MelodyTrack notes_to_melody(std::span<const MidiNote> notes, int ticks_per_quarter, Meter meter = {},
                            int min_steps = 0);

}  // namespace popgen

#endif  // POPGEN_MIDI_H
