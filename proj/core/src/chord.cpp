/**
 * @file chord.cpp
 * @brief Chord representation, label grammar and decoration algebra.
 */

#include "popgen/chord.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <string>

#include "popgen/error.h"

namespace popgen {

namespace {

constexpr std::array<int, 3> kMaj = {0, 4, 7};
constexpr std::array<int, 3> kMin = {0, 3, 7};
constexpr std::array<int, 3> kDim = {0, 3, 6};
constexpr std::array<int, 3> kAug = {0, 4, 8};
constexpr std::array<int, 4> kMaj7 = {0, 4, 7, 11};
constexpr std::array<int, 4> kMin7 = {0, 3, 7, 10};
constexpr std::array<int, 4> kDom7 = {0, 4, 7, 10};
constexpr std::array<int, 4> kDim7 = {0, 3, 6, 9};
constexpr std::array<int, 4> kHalfDim7 = {0, 3, 6, 10};
constexpr std::array<int, 4> kMinMaj7 = {0, 3, 7, 11};

/// Default semitones above the root for 9th / 11th / 13th (mod 12).
constexpr std::array<int, 3> kAddDefaults = {2, 5, 9};

constexpr std::array<std::string_view, 12> kNoteNames = {"C",  "C#", "D",  "D#", "E",  "F",
                                                         "F#", "G",  "G#", "A",  "A#", "B"};

int add_slot(Degree d) { return static_cast<int>(d) - static_cast<int>(Degree::Ninth); }
int omit_slot(Degree d) { return static_cast<int>(d); }

Degree add_degree_of_slot(int slot) {
  return static_cast<Degree>(slot + static_cast<int>(Degree::Ninth));
}

[[noreturn]] void malformed(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::MalformedSymbol, "'" + std::string(text) + "': " + std::string(why));
}

[[noreturn]] void unsupported(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::UnsupportedChordType, "'" + std::string(text) + "': " + std::string(why));
}

/// Base type plus the decorations implied by a (possibly richer) type token.
struct TypeToken {
  std::string_view name;
  ChordType type;
  Decorations deco;
};

Decorations with_add(Decorations d, int slot, int offset = 0) {
  d.add[slot] = offset;
  return d;
}

Decorations with_omit(Decorations d, int slot) {
  d.omit[slot] = true;
  return d;
}

const std::vector<TypeToken>& type_tokens() {
  static const std::vector<TypeToken> tokens = [] {
    const Decorations none{};
    std::vector<TypeToken> t = {
        {"maj", ChordType::Maj, none},
        {"min", ChordType::Min, none},
        {"dim", ChordType::Dim, none},
        {"aug", ChordType::Aug, none},
        {"maj7", ChordType::Maj7, none},
        {"min7", ChordType::Min7, none},
        {"7", ChordType::Dom7, none},
        {"dim7", ChordType::Dim7, none},
        {"hdim7", ChordType::HalfDim7, none},
        {"minmaj7", ChordType::MinMaj7, none},
        // canonicalized onto the reduced vocabulary
        {"sus2", ChordType::Maj, with_add(with_omit(none, 1), 0)},
        {"sus4", ChordType::Maj, with_add(with_omit(none, 1), 1)},
        {"maj6", ChordType::Maj, with_add(none, 2)},
        {"min6", ChordType::Min, with_add(none, 2)},
        {"9", ChordType::Dom7, with_add(none, 0)},
        {"maj9", ChordType::Maj7, with_add(none, 0)},
        {"min9", ChordType::Min7, with_add(none, 0)},
        {"11", ChordType::Dom7, with_add(with_add(none, 0), 1)},
        {"min11", ChordType::Min7, with_add(with_add(none, 0), 1)},
        {"13", ChordType::Dom7, with_add(with_add(none, 0), 2)},
        {"maj13", ChordType::Maj7, with_add(with_add(none, 0), 2)},
        {"min13", ChordType::Min7, with_add(with_add(none, 0), 2)},
        {"5", ChordType::Maj, with_omit(none, 1)},
        {"1", ChordType::Maj, with_omit(with_omit(none, 1), 2)},
    };
    return t;
  }();
  return tokens;
}

/// Splits "#b" accidental prefix off a token; returns the semitone shift.
int take_accidentals(std::string_view& token) {
  int shift = 0;
  while (!token.empty() && (token.front() == '#' || token.front() == 'b')) {
    shift += token.front() == '#' ? 1 : -1;
    token.remove_prefix(1);
  }
  return shift;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

/// Interval in semitones of a scale degree (1..13) in the major scale.
std::optional<int> degree_semitones(int degree) {
  static constexpr std::array<int, 7> kMajorScale = {0, 2, 4, 5, 7, 9, 11};
  if (degree < 1 || degree > 13) return std::nullopt;
  return kMajorScale[(degree - 1) % 7] + 12 * ((degree - 1) / 7);
}

/// Upgrades a triad to a seventh chord for "7" / "b7" / "bb7" extension tokens.
ChordType with_seventh(ChordType base, int seventh_interval, std::string_view text) {
  if (base == ChordType::Maj && seventh_interval == 10) return ChordType::Dom7;
  if (base == ChordType::Maj && seventh_interval == 11) return ChordType::Maj7;
  if (base == ChordType::Min && seventh_interval == 10) return ChordType::Min7;
  if (base == ChordType::Min && seventh_interval == 11) return ChordType::MinMaj7;
  if (base == ChordType::Dim && seventh_interval == 10) return ChordType::HalfDim7;
  if (base == ChordType::Dim && seventh_interval == 9) return ChordType::Dim7;
  unsupported(text, "seventh extension not expressible on this chord type");
}

struct ParsedExtensions {
  Decorations deco;
  std::optional<int> seventh;  ///< semitones of a requested seventh
};

ParsedExtensions parse_extension_list(std::string_view list, std::string_view text) {
  ParsedExtensions out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view token = list.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    pos = comma + 1;
    if (token.empty()) malformed(text, "empty extension token");

    bool omit = false;
    if (token.substr(0, 4) == "omit") {
      omit = true;
      token.remove_prefix(4);
    } else if (token.front() == '*') {
      omit = true;
      token.remove_prefix(1);
    }
    const int shift = take_accidentals(token);
    if (!all_digits(token) || token.size() > 2) malformed(text, "bad extension token");
    const int degree = std::stoi(std::string(token));

    if (omit) {
      if (shift != 0) malformed(text, "accidental on an omitted degree");
      switch (degree) {
        case 1: out.deco.omit[0] = true; break;
        case 3: out.deco.omit[1] = true; break;
        case 5: out.deco.omit[2] = true; break;
        default: unsupported(text, "only omit1, omit3 and omit5 are representable");
      }
      continue;
    }

    int slot = -1;
    switch (degree) {
      case 2: case 9: slot = 0; break;
      case 4: case 11: slot = 1; break;
      case 6: case 13: slot = 2; break;
      case 7: {
        out.seventh = 11 + shift;
        continue;
      }
      case 1: case 3: case 5:
        if (shift != 0) unsupported(text, "altered chord tones are outside the reduced vocabulary");
        continue;  // listing a chord tone changes nothing
      default: malformed(text, "unknown extension degree");
    }
    if (shift < -kMaxAddOffset || shift > kMaxAddOffset) malformed(text, "add offset out of range");
    out.deco.add[slot] = shift;
  }
  return out;
}

Decorations merge(const Decorations& a, const Decorations& b) {
  Decorations out = a;
  for (int i = 0; i < 3; ++i) {
    if (b.add[i]) out.add[i] = b.add[i];
    out.omit[i] = out.omit[i] || b.omit[i];
  }
  return out;
}

}  // namespace

PitchClass::PitchClass(int value) : value_(value) {
  if (value < 0 || value > 11) {
    throw Error(ErrorCode::InvalidParams, "pitch class out of range: " + std::to_string(value));
  }
}

PitchClassSet PitchClassSet::of(std::initializer_list<int> classes) {
  PitchClassSet s;
  for (int c : classes) s.insert(PitchClass::wrap(c));
  return s;
}

int PitchClassSet::size() const { return std::popcount(static_cast<unsigned>(mask_)); }

std::vector<int> PitchClassSet::values() const {
  std::vector<int> out;
  for (int i = 0; i < 12; ++i) {
    if ((mask_ >> i) & 1u) out.push_back(i);
  }
  return out;
}

PitchClassSet PitchClassSet::relative_to(PitchClass root) const {
  PitchClassSet out;
  for (int v : values()) out.insert(PitchClass::wrap(v - root.value()));
  return out;
}

std::span<const int> chord_type_intervals(ChordType type) {
  switch (type) {
    case ChordType::Maj: return kMaj;
    case ChordType::Min: return kMin;
    case ChordType::Dim: return kDim;
    case ChordType::Aug: return kAug;
    case ChordType::Maj7: return kMaj7;
    case ChordType::Min7: return kMin7;
    case ChordType::Dom7: return kDom7;
    case ChordType::Dim7: return kDim7;
    case ChordType::HalfDim7: return kHalfDim7;
    case ChordType::MinMaj7: return kMinMaj7;
  }
  return kMaj;
}

std::string_view chord_type_name(ChordType type) {
  switch (type) {
    case ChordType::Maj: return "maj";
    case ChordType::Min: return "min";
    case ChordType::Dim: return "dim";
    case ChordType::Aug: return "aug";
    case ChordType::Maj7: return "maj7";
    case ChordType::Min7: return "min7";
    case ChordType::Dom7: return "7";
    case ChordType::Dim7: return "dim7";
    case ChordType::HalfDim7: return "hdim7";
    case ChordType::MinMaj7: return "minmaj7";
  }
  return "maj";
}

bool Decorations::empty() const {
  return std::none_of(add.begin(), add.end(), [](const auto& a) { return a.has_value(); }) &&
         std::none_of(omit.begin(), omit.end(), [](bool o) { return o; });
}

std::optional<int> Decorations::add_offset(Degree d) const {
  if (!is_add_degree(d)) return std::nullopt;
  return add[add_slot(d)];
}

bool Decorations::omits(Degree d) const { return is_omit_degree(d) && omit[omit_slot(d)]; }

int Decorations::add_count() const {
  return static_cast<int>(std::count_if(add.begin(), add.end(), [](const auto& a) { return a.has_value(); }));
}

int Decorations::omit_count() const {
  return static_cast<int>(std::count(omit.begin(), omit.end(), true));
}

double DecorationWeights::weight(Degree d) const {
  switch (d) {
    case Degree::Root: return omit_root;
    case Degree::Third: return omit_third;
    case Degree::Fifth: return omit_fifth;
    case Degree::Ninth: return add_ninth;
    case Degree::Eleventh: return add_eleventh;
    case Degree::Thirteenth: return add_thirteenth;
  }
  return 0.0;
}

Chord make_chord(PitchClass root, ChordType type, int duration) {
  Chord c;
  c.root = root;
  c.type = type;
  c.bass = root;
  c.duration = duration;
  return c;
}

void validate(const Chord& chord) {
  if (chord.duration < 1) {
    throw Error(ErrorCode::InvariantViolation, "chord duration must be >= 1");
  }
  for (const auto& offset : chord.decorations.add) {
    if (offset && (*offset < -kMaxAddOffset || *offset > kMaxAddOffset)) {
      throw Error(ErrorCode::InvariantViolation, "add offset out of range");
    }
  }
  if (realize_pitch_classes(chord).empty()) {
    throw Error(ErrorCode::EmptyChord, render_chord_symbol(chord) + " realizes no pitch class");
  }
}

std::string_view note_name(PitchClass pc) { return kNoteNames[pc.value()]; }

PitchClass parse_note_name(std::string_view text) {
  if (text.empty()) malformed(text, "empty note name");
  static constexpr std::array<int, 7> kLetters = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char letter = text.front();
  if (letter < 'A' || letter > 'G') malformed(text, "note letter must be A-G");
  std::string_view rest = text.substr(1);
  const int shift = take_accidentals(rest);
  if (!rest.empty()) malformed(text, "trailing characters after note name");
  return PitchClass::wrap(kLetters[letter - 'A'] + shift);
}

Chord parse_chord_symbol(std::string_view text, int duration) {
  if (duration < 1) throw Error(ErrorCode::InvariantViolation, "chord duration must be >= 1");
  std::string_view rest = text;
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  while (!rest.empty() && rest.back() == ' ') rest.remove_suffix(1);
  if (rest.empty()) malformed(text, "empty label");

  // root
  std::size_t root_end = 1;
  while (root_end < rest.size() && (rest[root_end] == '#' || rest[root_end] == 'b')) ++root_end;
  const PitchClass root = parse_note_name(rest.substr(0, root_end));
  rest.remove_prefix(root_end);

  // bass
  std::optional<std::string_view> bass_token;
  if (const auto slash = rest.rfind('/'); slash != std::string_view::npos) {
    bass_token = rest.substr(slash + 1);
    rest = rest.substr(0, slash);
  }

  // type
  std::string_view type_token = "maj";
  if (!rest.empty() && rest.front() == ':') {
    rest.remove_prefix(1);
    const std::size_t paren = rest.find('(');
    type_token = rest.substr(0, paren);
    rest = paren == std::string_view::npos ? std::string_view{} : rest.substr(paren);
    if (type_token.empty() && !rest.empty()) unsupported(text, "interval-list chords need a type shorthand");
    if (type_token.empty()) malformed(text, "empty chord type");
  }

  const auto& tokens = type_tokens();
  const auto it = std::find_if(tokens.begin(), tokens.end(), [&](const TypeToken& t) { return t.name == type_token; });
  if (it == tokens.end()) unsupported(text, "unknown chord type '" + std::string(type_token) + "'");

  Chord chord = make_chord(root, it->type, duration);
  chord.decorations = it->deco;

  // extensions
  if (!rest.empty()) {
    if (rest.front() != '(' || rest.back() != ')') malformed(text, "extension list must be parenthesised");
    const ParsedExtensions ext = parse_extension_list(rest.substr(1, rest.size() - 2), text);
    if (ext.seventh) chord.type = with_seventh(chord.type, *ext.seventh, text);
    chord.decorations = merge(chord.decorations, ext.deco);
  }

  if (bass_token) {
    if (bass_token->empty()) malformed(text, "empty bass");
    if (bass_token->front() >= 'A' && bass_token->front() <= 'G') {
      chord.bass = parse_note_name(*bass_token);
    } else {
      // Harte interval bass, e.g. "/3" or "/b7"
      std::string_view degree = *bass_token;
      const int shift = take_accidentals(degree);
      if (!all_digits(degree) || degree.size() > 2) malformed(text, "bad bass");
      const auto semis = degree_semitones(std::stoi(std::string(degree)));
      if (!semis) malformed(text, "bass degree out of range");
      chord.bass = PitchClass::wrap(root.value() + *semis + shift);
    }
  }

  if (realize_pitch_classes(chord).empty()) {
    throw Error(ErrorCode::EmptyChord, "'" + std::string(text) + "' realizes no pitch class");
  }
  return chord;
}

std::string render_decorations(const Decorations& deco) {
  static constexpr std::array<std::string_view, 3> kAddNames = {"9", "11", "13"};
  static constexpr std::array<std::string_view, 3> kOmitNames = {"omit1", "omit3", "omit5"};
  std::string out;
  auto append = [&out](std::string_view token) {
    out += out.empty() ? "(" : ",";
    out += token;
  };
  for (int i = 0; i < 3; ++i) {
    if (!deco.add[i]) continue;
    const int off = *deco.add[i];
    std::string token(static_cast<std::size_t>(off < 0 ? -off : off), off < 0 ? 'b' : '#');
    token += kAddNames[i];
    append(token);
  }
  for (int i = 0; i < 3; ++i) {
    if (deco.omit[i]) append(kOmitNames[i]);
  }
  if (!out.empty()) out += ")";
  return out;
}

Decorations parse_decorations(std::string_view text) {
  if (text.empty() || text == "()") return {};
  std::string_view inner = text;
  if (inner.front() == '(' && inner.back() == ')') inner = inner.substr(1, inner.size() - 2);
  const ParsedExtensions ext = parse_extension_list(inner, text);
  if (ext.seventh) malformed(text, "seventh is not a decoration");
  return ext.deco;
}

std::string render_chord_symbol(const Chord& chord) {
  std::string out(note_name(chord.root));
  out += ":";
  out += chord_type_name(chord.type);
  out += render_decorations(chord.decorations);
  if (chord.bass != chord.root) {
    out += "/";
    out += note_name(chord.bass);
  }
  return out;
}

PitchClassSet realize_pitch_classes(const Chord& chord) {
  const auto intervals = chord_type_intervals(chord.type);
  PitchClassSet set;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (i < 3 && chord.decorations.omit[i]) continue;
    set.insert(PitchClass::wrap(chord.root.value() + intervals[i]));
  }
  for (int slot = 0; slot < 3; ++slot) {
    if (const auto& off = chord.decorations.add[slot]) {
      set.insert(PitchClass::wrap(chord.root.value() + kAddDefaults[slot] + *off));
    }
  }
  return set;
}

Chord apply_add(const Chord& chord, Degree degree, int offset) {
  if (!is_add_degree(degree)) {
    throw Error(ErrorCode::InvalidDegree, "add() accepts only 9th, 11th and 13th");
  }
  if (offset < -kMaxAddOffset || offset > kMaxAddOffset) {
    throw Error(ErrorCode::InvalidDegree, "add() offset out of range: " + std::to_string(offset));
  }
  Chord out = chord;
  out.decorations.add[add_slot(degree)] = offset;
  return out;
}

Chord apply_omit(const Chord& chord, Degree degree) {
  Chord out = chord;
  if (is_add_degree(degree)) {
    out.decorations.add[add_slot(degree)].reset();
  } else {
    out.decorations.omit[omit_slot(degree)] = true;
  }
  if (realize_pitch_classes(out).empty()) {
    throw Error(ErrorCode::EmptyChord, "omit would leave " + render_chord_symbol(chord) + " without pitches");
  }
  return out;
}

double decoration_distance(const Decorations& a, const Decorations& b, const DecorationWeights& weights) {
  double total = 0.0;
  for (int slot = 0; slot < 3; ++slot) {
    if (a.add[slot] != b.add[slot]) total += weights.weight(add_degree_of_slot(slot));
    if (a.omit[slot] != b.omit[slot]) total += weights.weight(static_cast<Degree>(slot));
  }
  return total;
}

double decoration_distance(const Chord& a, const Chord& b, const DecorationWeights& weights) {
  if (a.root != b.root || a.type != b.type) {
    throw Error(ErrorCode::RootOrTypeMismatch,
                render_chord_symbol(a) + " vs " + render_chord_symbol(b));
  }
  return decoration_distance(a.decorations, b.decorations, weights);
}

ChordTimeline::ChordTimeline(std::vector<Chord> chords) : chords_(std::move(chords)) {
  onsets_.reserve(chords_.size());
  for (const Chord& c : chords_) {
    validate(c);
    onsets_.push_back(total_steps_);
    total_steps_ += c.duration;
  }
}

std::size_t ChordTimeline::index_at(int step) const {
  if (step < 0 || step >= total_steps_) {
    throw Error(ErrorCode::LengthMismatch, "step " + std::to_string(step) + " outside chord timeline");
  }
  const auto it = std::upper_bound(onsets_.begin(), onsets_.end(), step);
  return static_cast<std::size_t>(std::distance(onsets_.begin(), it) - 1);
}

}  // namespace popgen
