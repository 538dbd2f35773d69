/**
 * @file generators.h
 * @brief Lead, secondary, harmonic and simplified melody generators.
 *
 * Each line is trend + stochastic layers, quantized under chord context.
 * Lead and secondary use a constant trend with SARMA layers (secondary at
 * reduced magnitude); harmonic uses bass + pattern with white-noise layers;
 * simplified keeps the lead's shape and deletes unimportant notes.
 */

#ifndef POPGEN_GENERATORS_H
#define POPGEN_GENERATORS_H

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "popgen/chord.h"
#include "popgen/contour.h"
#include "popgen/error_expertise.h"
#include "popgen/melody_track.h"
#include "popgen/sarma.h"

namespace popgen {

enum class MelodyKind { Lead, Secondary, Harmonic, Simplified };

std::string_view melody_kind_name(MelodyKind kind);
/// Throws ConfigError for unknown names.
MelodyKind parse_melody_kind(std::string_view name);

struct ZeroLayer {
  bool operator==(const ZeroLayer&) const = default;
};
struct WhiteNoiseLayer {
  double sigma = 0.3;
  bool operator==(const WhiteNoiseLayer&) const = default;
};
using LayerSpec = std::variant<SarmaParams, ZeroLayer, WhiteNoiseLayer>;

/// Semitone offsets from the chord bass, one per step of the period;
/// nullopt marks a rest.
struct PatternSpec {
  std::vector<std::optional<int>> offsets;

  int period() const { return static_cast<int>(offsets.size()); }
  bool operator==(const PatternSpec&) const = default;
};

/// Throws PeriodMismatch unless the period divides the bar; InvalidParams if all rests.
void validate(const PatternSpec& pattern, Meter meter = {});

struct ConstantTrend {
  double anchor = 67.0;
  bool operator==(const ConstantTrend&) const = default;
};
struct BassPatternTrend {
  PatternSpec pattern;
  int bass_floor = 36;  ///< bass pitch is the lowest MIDI note >= floor with the chord's bass class
  bool operator==(const BassPatternTrend&) const = default;
};
struct CopyOfLeadTrend {
  bool operator==(const CopyOfLeadTrend&) const = default;
};
using TrendSpec = std::variant<ConstantTrend, BassPatternTrend, CopyOfLeadTrend>;

struct ImportanceWeights {
  double downbeat = 1.0;
  double duration = 0.25;
  double extremum = 0.5;
  double passing = 0.75;
  double repetition = 0.5;

  bool operator==(const ImportanceWeights&) const = default;
};

struct GeneratorProfile {
  MelodyKind kind = MelodyKind::Lead;
  std::vector<LayerSpec> layers;  ///< layers 1..p
  TrendSpec trend;
  QuantizeConfig quantize;
  double density = 0.6;  ///< simplified only
  ImportanceWeights importance;

  int p() const { return static_cast<int>(layers.size()); }
  bool operator==(const GeneratorProfile&) const = default;
};

/// Throws ConfigError when the trend/layer shape does not match the kind.
void validate(const GeneratorProfile& profile);

/// sigma_k = 2.0 * 0.7^(p-k), phi 0.5, theta 0.3, Phi 0.4, Theta 0.2, s 4.
std::vector<LayerSpec> default_lead_layers(int p);
PatternSpec alberti_pattern();
GeneratorProfile default_lead_profile(int p = 6);
/// Lead layers with every sigma scaled by 0.5.
GeneratorProfile default_secondary_profile(int p = 6);
GeneratorProfile default_harmonic_profile(int p = 6);
GeneratorProfile default_simplified_profile(int p = 6);

/// Contour, layers and quantized track of one generated line.
struct GeneratedLine {
  MelodyTrack track;
  PitchCurve contour;
  LayeredSignals signals;
  std::vector<uint64_t> layer_seeds;
};

/// Shared trend + layers + quantize pipeline for lead, secondary and harmonic.
GeneratedLine generate_line(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                            const PitchContextModel& model, uint64_t seed, Meter meter = {});

MelodyTrack generate_lead(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                          const PitchContextModel& model, uint64_t seed, Meter meter = {});
MelodyTrack generate_secondary(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                               const PitchContextModel& model, uint64_t seed, Meter meter = {});
MelodyTrack generate_harmonic(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                              const PitchContextModel& model, uint64_t seed, Meter meter = {});
/// Simplified line: the lead's own contour, thinned by simplify().
MelodyTrack generate_simplified(const GeneratorProfile& profile, const MelodyTrack& lead);

struct HarmonicTrend {
  std::vector<double> values;
  std::vector<bool> rests;
};

/// bass(t) + offset(t mod period), each rendered offset snapped to the
/// nearest realized chord tone (ties downward); rests hold the previous value.
HarmonicTrend harmonic_trend(const BassPatternTrend& trend, const ChordTimeline& chords, int n);

/// One bar-aligned accompaniment figure and the chord it sounds over.
struct PatternSample {
  MelodyTrack steps;
  Chord chord;
};

/// Mean offset from the chord bass per step, rounded; majority-silent steps become rests.
PatternSpec estimate_pattern(std::span<const PatternSample> samples);

/// Local extremum against the neighbouring onsets (both must exist).
bool is_contour_extremum(const MelodyTrack& track, int onset);
/// Weighted feature score of the note starting at `onset`. Throws NotAnOnset.
double note_importance(const MelodyTrack& track, int onset, const ImportanceWeights& weights = {});

/// Deletes the least important onsets until kept/total <= target_density.
/// Deleted notes extend the previous note (or rest when nothing sounds);
/// when a beat note is deleted the next surviving onset inside that beat
/// moves onto the beat.
MelodyTrack simplify(const MelodyTrack& lead, double target_density, const ImportanceWeights& weights = {});

}  // namespace popgen

#endif  // POPGEN_GENERATORS_H
