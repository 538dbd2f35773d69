/**
 * @file error_expertise.h
 * @brief Chord-aware quantization of a real contour into MIDI pitches, with
 *        rhythm derived by merging near-equal neighbours into sustains.
 */

#ifndef POPGEN_ERROR_EXPERTISE_H
#define POPGEN_ERROR_EXPERTISE_H

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popgen/chord.h"
#include "popgen/contour.h"
#include "popgen/melody_track.h"

namespace popgen {

/// Chord type plus the realized pitch-class set relative to the root.
struct ChordSignature {
  ChordType type = ChordType::Maj;
  uint16_t relative_mask = 0;

  auto operator<=>(const ChordSignature&) const = default;
};

ChordSignature chord_signature(const Chord& chord);

/// Weights over the 12 pitch classes, indexed relative to the chord root.
using PitchWeights = std::array<double, 12>;

/// Chord tones 1.0, other major-scale degrees of the root 0.3, the rest 0.05; normalized.
PitchWeights rule_based_prior(const Chord& chord);

class PitchContextModel {
 public:
  enum class Mode { Learned, RuleBased };

  static PitchContextModel rule_based();
  /// Every row must be positive and sum to 1 (1e-9).
  explicit PitchContextModel(std::map<ChordSignature, PitchWeights> rows);

  Mode mode() const { return mode_; }
  const std::map<ChordSignature, PitchWeights>& rows() const { return rows_; }
  /// Learned row when the signature was seen, otherwise the rule-based prior.
  PitchWeights row_for(const Chord& chord) const;
  /// w(pitch mod 12 | chord).
  double weight(int midi_pitch, const Chord& chord) const;

  bool operator==(const PitchContextModel&) const = default;

 private:
  PitchContextModel() = default;

  Mode mode_ = Mode::RuleBased;
  std::map<ChordSignature, PitchWeights> rows_;
};

struct PairedExample {
  MelodyTrack melody;
  ChordTimeline chords;
};

/// Add-one smoothed frequency of sounding pitch classes per chord signature.
PitchContextModel train_pitch_context(std::span<const PairedExample> corpus);

struct QuantizeConfig {
  double eta = 0.5;      ///< merge threshold in semitones
  double sigma_q = 1.0;  ///< Gaussian width in semitones
  int low = 48;
  int high = 84;
  bool stochastic = false;
  uint64_t seed = 0;

  bool operator==(const QuantizeConfig&) const = default;
};

/// Throws InvalidParams / EmptyRange.
void validate(const QuantizeConfig& cfg);

/// Step i becomes Sustain when |c_i - c_{i-1}| < eta (never the first step
/// and never right after a rest); otherwise the pitch j in [low, high]
/// maximizing N(j; c_i, sigma_q^2) * w(j | chord) is chosen (ties go low), or
/// sampled in proportion to it in stochastic mode. Steps flagged in `rests`
/// become Silence.
MelodyTrack quantize(const PitchCurve& contour, const ChordTimeline& chords, const PitchContextModel& model,
                     const QuantizeConfig& cfg, const std::vector<bool>& rests = {}, Meter meter = {});

/// Versioned JSON (format "popgen.pitch_context", version 1).
std::string serialize_pitch_context(const PitchContextModel& model);
PitchContextModel parse_pitch_context(std::string_view json_text);
void save_pitch_context(const PitchContextModel& model, const std::filesystem::path& path);
PitchContextModel load_pitch_context(const std::filesystem::path& path);

}  // namespace popgen

#endif  // POPGEN_ERROR_EXPERTISE_H
