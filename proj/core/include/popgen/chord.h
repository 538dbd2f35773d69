/**
 * @file chord.h
 * @brief Four-part chord representation (root, type, decorations, bass),
 *        Harte-style label parsing/rendering and the add/omit decoration algebra.
 */

#ifndef POPGEN_CHORD_H
#define POPGEN_CHORD_H

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace popgen {

/// One of the 12 pitch classes, 0 = C.
class PitchClass {
 public:
  constexpr PitchClass() = default;
  /// Throws Error(InvalidParams) outside [0, 11].
  explicit PitchClass(int value);

  /// Folds any semitone count into [0, 11].
  static constexpr PitchClass wrap(int semitones) {
    PitchClass pc;
    pc.value_ = ((semitones % 12) + 12) % 12;
    return pc;
  }

  constexpr int value() const { return value_; }

  constexpr auto operator<=>(const PitchClass&) const = default;

 private:
  int value_ = 0;
};

/// Pitch-class set stored as a 12-bit mask (bit i = pitch class i).
class PitchClassSet {
 public:
  constexpr PitchClassSet() = default;
  static PitchClassSet of(std::initializer_list<int> classes);
  static constexpr PitchClassSet from_mask(uint16_t mask) {
    PitchClassSet s;
    s.mask_ = mask & 0x0FFF;
    return s;
  }

  void insert(PitchClass pc) { mask_ |= static_cast<uint16_t>(1u << pc.value()); }
  void erase(PitchClass pc) { mask_ &= static_cast<uint16_t>(~(1u << pc.value())); }
  bool contains(PitchClass pc) const { return (mask_ >> pc.value()) & 1u; }
  bool contains(int pitch) const { return contains(PitchClass::wrap(pitch)); }
  int size() const;
  bool empty() const { return mask_ == 0; }
  uint16_t mask() const { return mask_; }
  /// Ascending pitch classes.
  std::vector<int> values() const;
  /// Rotates the set so that `root` maps to 0.
  PitchClassSet relative_to(PitchClass root) const;

  constexpr bool operator==(const PitchClassSet&) const = default;

 private:
  uint16_t mask_ = 0;
};

/// Chord type after reduction to triads and seventh chords.
enum class ChordType : uint8_t { Maj, Min, Dim, Aug, Maj7, Min7, Dom7, Dim7, HalfDim7, MinMaj7 };

inline constexpr std::array<ChordType, 10> kAllChordTypes = {
    ChordType::Maj,  ChordType::Min,  ChordType::Dim,  ChordType::Aug,      ChordType::Maj7,
    ChordType::Min7, ChordType::Dom7, ChordType::Dim7, ChordType::HalfDim7, ChordType::MinMaj7};

inline constexpr int kChordTypeCount = static_cast<int>(kAllChordTypes.size());

/// Semitone intervals above the root (root, third, fifth[, seventh]).
std::span<const int> chord_type_intervals(ChordType type);
/// Harte shorthand ("maj", "min7", "7", ...).
std::string_view chord_type_name(ChordType type);
inline int chord_type_index(ChordType type) { return static_cast<int>(type); }

/// Chord degrees addressable by the decoration operations.
enum class Degree : uint8_t { Root, Third, Fifth, Ninth, Eleventh, Thirteenth };

inline constexpr bool is_add_degree(Degree d) {
  return d == Degree::Ninth || d == Degree::Eleventh || d == Degree::Thirteenth;
}
inline constexpr bool is_omit_degree(Degree d) {
  return d == Degree::Root || d == Degree::Third || d == Degree::Fifth;
}

/// Add offsets are semitones relative to major 9th / perfect 11th / major 13th.
inline constexpr int kMaxAddOffset = 2;

/// The (add, omit) tuple attached to a chord.
struct Decorations {
  /// Indexed 0 = 9th, 1 = 11th, 2 = 13th; value is the semitone offset.
  std::array<std::optional<int>, 3> add{};
  /// Indexed 0 = root, 1 = third, 2 = fifth.
  std::array<bool, 3> omit{};

  bool empty() const;
  std::optional<int> add_offset(Degree d) const;
  bool omits(Degree d) const;
  int add_count() const;
  int omit_count() const;

  auto operator<=>(const Decorations&) const = default;
};

/// Weight of each decoration slot in the change magnitude.
struct DecorationWeights {
  double omit_root = 1.0;
  double omit_third = 0.6;
  double omit_fifth = 0.6;
  double add_ninth = 0.4;
  double add_eleventh = 0.3;
  double add_thirteenth = 0.2;

  double weight(Degree d) const;
};

inline constexpr int kDefaultChordDuration = 16;

/// Structured chord; duration counts 16th-note steps.
struct Chord {
  PitchClass root;
  ChordType type = ChordType::Maj;
  Decorations decorations;
  PitchClass bass;
  int duration = kDefaultChordDuration;

  bool operator==(const Chord&) const = default;
};

/// Undecorated root-position chord.
Chord make_chord(PitchClass root, ChordType type, int duration = kDefaultChordDuration);

/// Throws Error(InvariantViolation / EmptyChord) when the chord is not well formed.
void validate(const Chord& chord);

/// Parses "<note>[:type][(ext{,ext})][/bass]". Richer labels are canonicalized
/// into the reduced type vocabulary plus decorations.
Chord parse_chord_symbol(std::string_view text, int duration = kDefaultChordDuration);
/// Canonical label; parse_chord_symbol(render_chord_symbol(c), c.duration) == c.
std::string render_chord_symbol(const Chord& chord);
/// Parenthesised extension list, or "" for empty decorations.
std::string render_decorations(const Decorations& deco);
/// Parses the inside of an extension list ("9,omit3") into decorations.
Decorations parse_decorations(std::string_view text);

/// Sharp-only spelling.
std::string_view note_name(PitchClass pc);
/// Accepts A-G followed by any run of '#' / 'b'. Throws MalformedSymbol.
PitchClass parse_note_name(std::string_view text);

PitchClassSet realize_pitch_classes(const Chord& chord);

Chord apply_add(const Chord& chord, Degree degree, int offset);
/// Omitting an extension degree removes the add entry if present, else nothing happens.
Chord apply_omit(const Chord& chord, Degree degree);

double decoration_distance(const Decorations& a, const Decorations& b,
                           const DecorationWeights& weights = {});
/// Throws RootOrTypeMismatch when the chords differ in root or type.
double decoration_distance(const Chord& a, const Chord& b, const DecorationWeights& weights = {});

/// A progression laid out on the 16th-note grid.
class ChordTimeline {
 public:
  ChordTimeline() = default;
  explicit ChordTimeline(std::vector<Chord> chords);

  const std::vector<Chord>& chords() const { return chords_; }
  int total_steps() const { return total_steps_; }
  std::size_t size() const { return chords_.size(); }
  /// Index of the chord sounding at `step`.
  std::size_t index_at(int step) const;
  const Chord& chord_at(int step) const { return chords_[index_at(step)]; }
  int onset_of(std::size_t index) const { return onsets_[index]; }

 private:
  std::vector<Chord> chords_;
  std::vector<int> onsets_;
  int total_steps_ = 0;
};

}  // namespace popgen

#endif  // POPGEN_CHORD_H
