/**
 * @file generators.cpp
 * @brief Melody line generators, pattern estimation and simplification.
 */

#include "popgen/generators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "popgen/error.h"
#include "popgen/seed.h"

namespace popgen {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int bass_pitch(PitchClass bass, int floor) {
  const int shift = PitchClass::wrap(bass.value() - floor).value();
  return floor + shift;
}

/// Nearest MIDI pitch to `target` whose class is in `tones`; ties go down.
int snap_to_chord_tone(int target, const PitchClassSet& tones) {
  for (int d = 0; d <= 6; ++d) {
    if (tones.contains(target - d)) return target - d;
    if (tones.contains(target + d)) return target + d;
  }
  return target;
}

std::vector<double> layer_values(const LayerSpec& spec, int p, int n, int k, uint64_t seed) {
  return std::visit(Overloaded{
                        [&](const SarmaParams& params) { return generate_layer(params, p, n, k, seed); },
                        [&](const ZeroLayer&) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); },
                        [&](const WhiteNoiseLayer& wn) {
                          const int points = n / layer_stride(n, k);
                          return shape_layer(white_noise(wn.sigma, points, seed), p, n, k);
                        },
                    },
                    spec);
}

void check_kind(const GeneratorProfile& profile, MelodyKind expected) {
  if (profile.kind != expected) {
    throw Error(ErrorCode::ConfigError, "profile is for " + std::string(melody_kind_name(profile.kind)) +
                                            ", expected " + std::string(melody_kind_name(expected)));
  }
}

}  // namespace

std::string_view melody_kind_name(MelodyKind kind) {
  switch (kind) {
    case MelodyKind::Lead: return "lead";
    case MelodyKind::Secondary: return "secondary";
    case MelodyKind::Harmonic: return "harmonic";
    case MelodyKind::Simplified: return "simplified";
  }
  return "lead";
}

MelodyKind parse_melody_kind(std::string_view name) {
  for (MelodyKind k : {MelodyKind::Lead, MelodyKind::Secondary, MelodyKind::Harmonic, MelodyKind::Simplified}) {
    if (melody_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown melody kind '" + std::string(name) + "'");
}

void validate(const PatternSpec& pattern, Meter meter) {
  const int period = pattern.period();
  if (period < 1 || meter.steps_per_bar() % period != 0) {
    throw Error(ErrorCode::PeriodMismatch,
                "pattern period " + std::to_string(period) + " does not divide the bar");
  }
  if (std::none_of(pattern.offsets.begin(), pattern.offsets.end(), [](const auto& o) { return o.has_value(); })) {
    throw Error(ErrorCode::InvalidParams, "pattern has no sounding step");
  }
}

void validate(const GeneratorProfile& profile) {
  if (profile.layers.empty()) throw Error(ErrorCode::ConfigError, "profile needs at least one stochastic layer");
  validate(profile.quantize);
  for (const LayerSpec& layer : profile.layers) {
    if (const auto* params = std::get_if<SarmaParams>(&layer)) validate(*params);
    if (const auto* wn = std::get_if<WhiteNoiseLayer>(&layer); wn && !(wn->sigma >= 0.0)) {
      throw Error(ErrorCode::InvalidParams, "white-noise sigma must be >= 0");
    }
  }
  switch (profile.kind) {
    case MelodyKind::Lead:
    case MelodyKind::Secondary:
      if (!std::holds_alternative<ConstantTrend>(profile.trend)) {
        throw Error(ErrorCode::ConfigError, "lead/secondary profiles need a constant trend");
      }
      break;
    case MelodyKind::Harmonic:
      if (const auto* bp = std::get_if<BassPatternTrend>(&profile.trend)) {
        validate(bp->pattern);
      } else {
        throw Error(ErrorCode::ConfigError, "harmonic profile needs a bass-plus-pattern trend");
      }
      break;
    case MelodyKind::Simplified:
      if (!std::holds_alternative<CopyOfLeadTrend>(profile.trend)) {
        throw Error(ErrorCode::ConfigError, "simplified profile copies the lead trend");
      }
      if (!std::all_of(profile.layers.begin(), profile.layers.end(),
                       [](const LayerSpec& l) { return std::holds_alternative<ZeroLayer>(l); })) {
        throw Error(ErrorCode::ConfigError, "simplified profile keeps every stochastic layer at zero");
      }
      if (!(profile.density > 0.0 && profile.density <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "simplification density must lie in (0, 1]");
      }
      break;
  }
}

std::vector<LayerSpec> default_lead_layers(int p) {
  std::vector<LayerSpec> layers;
  for (int k = 1; k <= p; ++k) {
    SarmaParams params;
    params.phi = 0.5;
    params.theta = 0.3;
    params.seasonal_phi = 0.4;
    params.seasonal_theta = 0.2;
    params.season = 4;
    params.sigma = 2.0 * std::pow(0.7, p - k);
    params.burn_in = 200;
    layers.emplace_back(params);
  }
  return layers;
}

PatternSpec alberti_pattern() { return PatternSpec{{0, 7, 4, 7}}; }

GeneratorProfile default_lead_profile(int p) {
  GeneratorProfile profile;
  profile.kind = MelodyKind::Lead;
  profile.layers = default_lead_layers(p);
  profile.trend = ConstantTrend{67.0};
  return profile;
}

GeneratorProfile default_secondary_profile(int p) {
  GeneratorProfile profile = default_lead_profile(p);
  profile.kind = MelodyKind::Secondary;
  for (LayerSpec& layer : profile.layers) std::get<SarmaParams>(layer).sigma *= 0.5;
  return profile;
}

GeneratorProfile default_harmonic_profile(int p) {
  GeneratorProfile profile;
  profile.kind = MelodyKind::Harmonic;
  profile.layers.assign(static_cast<std::size_t>(p), WhiteNoiseLayer{0.3});
  profile.trend = BassPatternTrend{alberti_pattern(), 36};
  profile.quantize.low = 28;
  profile.quantize.high = 60;
  return profile;
}

GeneratorProfile default_simplified_profile(int p) {
  GeneratorProfile profile;
  profile.kind = MelodyKind::Simplified;
  profile.layers.assign(static_cast<std::size_t>(p), ZeroLayer{});
  profile.trend = CopyOfLeadTrend{};
  return profile;
}

HarmonicTrend harmonic_trend(const BassPatternTrend& trend, const ChordTimeline& chords, int n) {
  if (chords.total_steps() != n) throw Error(ErrorCode::LengthMismatch, "chord timeline length differs from n");
  const int period = trend.pattern.period();
  if (period < 1) throw Error(ErrorCode::PeriodMismatch, "empty pattern");

  HarmonicTrend out;
  out.values.resize(static_cast<std::size_t>(n));
  out.rests.resize(static_cast<std::size_t>(n), false);
  double held = bass_pitch(chords.chord_at(0).bass, trend.bass_floor);
  for (int t = 0; t < n; ++t) {
    const Chord& chord = chords.chord_at(t);
    const auto& offset = trend.pattern.offsets[static_cast<std::size_t>(t % period)];
    if (!offset) {
      out.rests[static_cast<std::size_t>(t)] = true;
      out.values[static_cast<std::size_t>(t)] = held;
      continue;
    }
    const int target = bass_pitch(chord.bass, trend.bass_floor) + *offset;
    held = snap_to_chord_tone(target, realize_pitch_classes(chord));
    out.values[static_cast<std::size_t>(t)] = held;
  }
  return out;
}

GeneratedLine generate_line(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                            const PitchContextModel& model, uint64_t seed, Meter meter) {
  validate(profile);
  if (profile.kind == MelodyKind::Simplified) {
    throw Error(ErrorCode::ConfigError, "simplified lines derive from a lead track");
  }
  const int p = profile.p();
  check_layer_shape(n, p);
  if (chords.total_steps() != n) {
    throw Error(ErrorCode::LengthMismatch, "phrase length " + std::to_string(n) + " but chords cover " +
                                               std::to_string(chords.total_steps()) + " steps");
  }

  GeneratedLine line;
  line.signals.p = p;
  std::vector<bool> rests;
  if (const auto* constant = std::get_if<ConstantTrend>(&profile.trend)) {
    line.signals.layers.emplace_back(static_cast<std::size_t>(n), constant->anchor);
  } else {
    HarmonicTrend trend = harmonic_trend(std::get<BassPatternTrend>(profile.trend), chords, n);
    line.signals.layers.push_back(std::move(trend.values));
    rests = std::move(trend.rests);
  }
  for (int k = 1; k <= p; ++k) {
    const uint64_t layer_seed = derive_seed(seed, SeedStage::Layer, static_cast<uint64_t>(k));
    line.layer_seeds.push_back(layer_seed);
    line.signals.layers.push_back(layer_values(profile.layers[static_cast<std::size_t>(k - 1)], p, n, k, layer_seed));
  }
  validate_structure(line.signals, profile.kind != MelodyKind::Harmonic);

  line.contour = reconstruct(line.signals);
  QuantizeConfig qcfg = profile.quantize;
  qcfg.seed = derive_seed(seed, SeedStage::Quantize);
  line.track = quantize(line.contour, chords, model, qcfg, rests, meter);
  validate(line.track);
  return line;
}

MelodyTrack generate_lead(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                          const PitchContextModel& model, uint64_t seed, Meter meter) {
  check_kind(profile, MelodyKind::Lead);
  return generate_line(profile, chords, n, model, seed, meter).track;
}

MelodyTrack generate_secondary(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                               const PitchContextModel& model, uint64_t seed, Meter meter) {
  check_kind(profile, MelodyKind::Secondary);
  return generate_line(profile, chords, n, model, seed, meter).track;
}

MelodyTrack generate_harmonic(const GeneratorProfile& profile, const ChordTimeline& chords, int n,
                              const PitchContextModel& model, uint64_t seed, Meter meter) {
  check_kind(profile, MelodyKind::Harmonic);
  return generate_line(profile, chords, n, model, seed, meter).track;
}

MelodyTrack generate_simplified(const GeneratorProfile& profile, const MelodyTrack& lead) {
  check_kind(profile, MelodyKind::Simplified);
  validate(profile);
  return simplify(lead, profile.density, profile.importance);
}

PatternSpec estimate_pattern(std::span<const PatternSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no pattern samples");
  const int period = samples.front().steps.length();
  if (period < 1) throw Error(ErrorCode::EmptySamples, "pattern sample has no steps");

  std::vector<double> sums(static_cast<std::size_t>(period), 0.0);
  std::vector<int> sounding(static_cast<std::size_t>(period), 0);
  std::vector<int> silent(static_cast<std::size_t>(period), 0);

  for (const PatternSample& sample : samples) {
    if (sample.steps.length() != period) {
      throw Error(ErrorCode::PeriodMismatch, "pattern samples differ in length");
    }
    std::vector<int> pitches(static_cast<std::size_t>(period), -1);
    int lowest = 128;
    for (int t = 0; t < period; ++t) {
      pitches[static_cast<std::size_t>(t)] = sounding_pitch(sample.steps, t);
      if (pitches[static_cast<std::size_t>(t)] >= 0) lowest = std::min(lowest, pitches[static_cast<std::size_t>(t)]);
    }
    // reference bass: highest note of the chord's bass class at or below the figure
    const int reference = lowest - PitchClass::wrap(lowest - sample.chord.bass.value()).value();
    for (int t = 0; t < period; ++t) {
      const int pitch = pitches[static_cast<std::size_t>(t)];
      if (pitch < 0) {
        ++silent[static_cast<std::size_t>(t)];
      } else {
        ++sounding[static_cast<std::size_t>(t)];
        sums[static_cast<std::size_t>(t)] += pitch - reference;
      }
    }
  }

  PatternSpec out;
  out.offsets.resize(static_cast<std::size_t>(period));
  for (int t = 0; t < period; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (2 * silent[i] > sounding[i] + silent[i] || sounding[i] == 0) continue;
    out.offsets[i] = static_cast<int>(std::lround(sums[i] / sounding[i]));
  }
  return out;
}

namespace {

struct Neighbours {
  std::optional<int> prev;
  std::optional<int> next;
};

Neighbours neighbour_pitches(const MelodyTrack& track, int onset) {
  Neighbours out;
  for (int i = onset - 1; i >= 0; --i) {
    if (track.steps[static_cast<std::size_t>(i)].is_pitch()) {
      out.prev = track.steps[static_cast<std::size_t>(i)].midi();
      break;
    }
  }
  for (int i = onset + 1; i < track.length(); ++i) {
    if (track.steps[static_cast<std::size_t>(i)].is_pitch()) {
      out.next = track.steps[static_cast<std::size_t>(i)].midi();
      break;
    }
  }
  return out;
}

void require_onset(const MelodyTrack& track, int onset) {
  if (onset < 0 || onset >= track.length() || !track.steps[static_cast<std::size_t>(onset)].is_pitch()) {
    throw Error(ErrorCode::NotAnOnset, "step " + std::to_string(onset) + " is not a note onset");
  }
}

}  // namespace

bool is_contour_extremum(const MelodyTrack& track, int onset) {
  require_onset(track, onset);
  const int pitch = track.steps[static_cast<std::size_t>(onset)].midi();
  const Neighbours nb = neighbour_pitches(track, onset);
  if (!nb.prev || !nb.next) return false;
  return (pitch > *nb.prev && pitch > *nb.next) || (pitch < *nb.prev && pitch < *nb.next);
}

double note_importance(const MelodyTrack& track, int onset, const ImportanceWeights& weights) {
  require_onset(track, onset);
  const int pitch = track.steps[static_cast<std::size_t>(onset)].midi();
  const Neighbours nb = neighbour_pitches(track, onset);

  double score = 0.0;
  if (onset % kStepsPerBeat == 0) {
    score += onset % track.meter.steps_per_bar() == 0 ? 2.0 * weights.downbeat : weights.downbeat;
  }
  score += weights.duration * note_length(track, onset);
  if (is_contour_extremum(track, onset)) score += weights.extremum;

  if (nb.prev && nb.next) {
    const int in = pitch - *nb.prev;
    const int out = *nb.next - pitch;
    const bool stepwise = std::abs(in) >= 1 && std::abs(in) <= 2 && std::abs(out) >= 1 && std::abs(out) <= 2;
    if (stepwise && (in > 0) == (out > 0)) score -= weights.passing;
  }
  const bool repeated = (nb.prev && *nb.prev == pitch) || (nb.next && *nb.next == pitch);
  const bool alternating = nb.prev && nb.next && *nb.prev == *nb.next && std::abs(pitch - *nb.prev) <= 2;
  if (repeated || alternating) score -= weights.repetition;
  return score;
}

MelodyTrack simplify(const MelodyTrack& lead, double target_density, const ImportanceWeights& weights) {
  if (lead.steps.empty()) throw Error(ErrorCode::EmptyTrack, "nothing to simplify");
  if (!(target_density > 0.0 && target_density <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "target density must lie in (0, 1]");
  }
  validate(lead);

  const std::vector<int> onsets = onset_steps(lead);
  const int total = static_cast<int>(onsets.size());
  const int keep = static_cast<int>(std::floor(target_density * total + 1e-9));
  if (keep >= total) return lead;

  struct Ranked {
    int step;
    bool extremum;
    double score;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(onsets.size());
  for (int step : onsets) ranked.push_back({step, is_contour_extremum(lead, step), note_importance(lead, step, weights)});
  // deletion order: non-extrema first, then lowest score, later notes before earlier ones
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.extremum != b.extremum) return !a.extremum;
    if (a.score != b.score) return a.score < b.score;
    return a.step > b.step;
  });

  std::vector<int> deleted;
  for (int i = 0; i < total - keep; ++i) deleted.push_back(ranked[static_cast<std::size_t>(i)].step);
  std::sort(deleted.begin(), deleted.end());

  MelodyTrack out = lead;
  for (int step : deleted) {
    const int len = note_length(lead, step);
    const bool something_sounds = step > 0 && !out.steps[static_cast<std::size_t>(step - 1)].is_silence();
    if (something_sounds) {
      out.steps[static_cast<std::size_t>(step)] = StepState::sustain();
    } else {
      for (int i = step; i < step + len; ++i) out.steps[static_cast<std::size_t>(i)] = StepState::silence();
    }
  }

  for (int step : deleted) {
    if (step % kStepsPerBeat != 0) continue;
    const int beat_end = step + kStepsPerBeat;
    for (int j = step + 1; j < beat_end && j < out.length(); ++j) {
      const StepState s = out.steps[static_cast<std::size_t>(j)];
      if (!s.is_pitch()) continue;
      out.steps[static_cast<std::size_t>(step)] = s;
      for (int i = step + 1; i <= j; ++i) out.steps[static_cast<std::size_t>(i)] = StepState::sustain();
      break;
    }
  }
  validate(out);
  return out;
}

}  // namespace popgen
