/**
 * @file integration.cpp
 * @brief Right-hand assembly, smoothness gate and column chords.
 */

#include "popgen/integration.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "popgen/error.h"

namespace popgen {

PolyTrack to_poly(const MelodyTrack& track) {
  PolyTrack out;
  out.meter = track.meter;
  out.steps.resize(track.steps.size());
  int held = -1;
  for (std::size_t i = 0; i < track.steps.size(); ++i) {
    const StepState& s = track.steps[i];
    if (s.is_pitch()) {
      held = s.midi();
      out.steps[i].push_back({held, true});
    } else if (s.is_sustain() && held >= 0) {
      out.steps[i].push_back({held, false});
    } else {
      held = -1;
    }
  }
  return out;
}

void validate(const PolyTrack& track) {
  for (std::size_t i = 0; i < track.steps.size(); ++i) {
    const auto& events = track.steps[i];
    for (std::size_t a = 0; a < events.size(); ++a) {
      if (events[a].midi < 0 || events[a].midi > 127) {
        throw Error(ErrorCode::InvariantViolation, "pitch out of MIDI range at step " + std::to_string(i));
      }
      for (std::size_t b = a + 1; b < events.size(); ++b) {
        if (events[a].midi == events[b].midi) {
          throw Error(ErrorCode::InvariantViolation, "duplicate pitch at step " + std::to_string(i));
        }
      }
      if (!events[a].onset) {
        const bool continues = i > 0 && std::any_of(track.steps[i - 1].begin(), track.steps[i - 1].end(),
                                                     [&](const PolyEvent& e) { return e.midi == events[a].midi; });
        if (!continues) {
          throw Error(ErrorCode::InvariantViolation, "continuation of a silent pitch at step " + std::to_string(i));
        }
      }
    }
  }
}

void validate(const Arrangement& arrangement) {
  validate(arrangement.lead);
  validate(arrangement.left_hand);
  validate(arrangement.right_hand);
  const int n = arrangement.lead.length();
  if (arrangement.right_hand.length() != n || arrangement.left_hand.length() != n) {
    throw Error(ErrorCode::InvariantViolation, "arrangement tracks differ in length");
  }
  if (arrangement.chords.total_steps() != n) {
    throw Error(ErrorCode::InvariantViolation, "chord timeline does not cover the arrangement");
  }
}

double bar_smoothness(const MelodyTrack& track, int bar) {
  const int per_bar = track.meter.steps_per_bar();
  if (bar < 0 || bar * per_bar >= track.length()) {
    throw Error(ErrorCode::BarOutOfRange, "bar " + std::to_string(bar) + " outside track");
  }
  const int end = std::min(track.length(), (bar + 1) * per_bar);
  std::vector<int> pitches;
  for (int i = bar * per_bar; i < end; ++i) {
    if (track.steps[static_cast<std::size_t>(i)].is_pitch()) pitches.push_back(track.steps[static_cast<std::size_t>(i)].midi());
  }
  if (pitches.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < pitches.size(); ++i) total += std::abs(pitches[i] - pitches[i - 1]);
  return -total / static_cast<double>(pitches.size() - 1);
}

std::vector<RightHandSource> choose_right_hand_sources(const MelodyTrack& lead, double tau) {
  std::vector<RightHandSource> out;
  for (int bar = 0; bar < lead.bar_count(); ++bar) {
    out.push_back(bar_smoothness(lead, bar) > tau ? RightHandSource::Secondary : RightHandSource::Simplified);
  }
  return out;
}

MelodyTrack assemble_right_hand(const MelodyTrack& lead, const MelodyTrack& secondary,
                                const MelodyTrack& simplified, double tau) {
  if (secondary.length() != lead.length() || simplified.length() != lead.length()) {
    throw Error(ErrorCode::LengthMismatch, "right-hand sources differ in length from the lead");
  }
  validate(secondary);
  validate(simplified);

  const auto sources = choose_right_hand_sources(lead, tau);
  const int per_bar = lead.meter.steps_per_bar();
  MelodyTrack out;
  out.meter = lead.meter;
  out.steps.reserve(lead.steps.size());
  for (std::size_t bar = 0; bar < sources.size(); ++bar) {
    const MelodyTrack& src = sources[bar] == RightHandSource::Secondary ? secondary : simplified;
    const int start = static_cast<int>(bar) * per_bar;
    const int end = std::min(lead.length(), start + per_bar);
    for (int i = start; i < end; ++i) out.steps.push_back(src.steps[static_cast<std::size_t>(i)]);

    if (start > 0 && src.steps[static_cast<std::size_t>(start)].is_sustain()) {
      const int wanted = sounding_pitch(src, start - 1);
      if (sounding_pitch(out, start - 1) != wanted && wanted >= 0) {
        out.steps[static_cast<std::size_t>(start)] = StepState::pitch(wanted);
      }
    }
  }
  validate(out);
  return out;
}

double metric_strength(int step, Meter meter) {
  if (step % meter.steps_per_bar() == 0) return 1.0;
  if (step % kStepsPerBeat == 0) return 0.75;
  if (step % 2 == 0) return 0.5;
  return 0.25;
}

double column_chord_probability(int midi, int step, const ColumnChordPolicy& policy, Meter meter) {
  const double span = static_cast<double>(policy.range_high - policy.range_low);
  const double pitch_norm = span > 0.0 ? (midi - policy.range_low) / span : 0.0;
  const double p = policy.bias + policy.w_pitch * pitch_norm + policy.w_metric * metric_strength(step, meter);
  return std::clamp(p, 0.0, 1.0);
}

PolyTrack add_column_chords(const MelodyTrack& track, const ChordTimeline& chords, const ColumnChordPolicy& policy) {
  validate(track);
  if (track.length() != chords.total_steps()) {
    throw Error(ErrorCode::LengthMismatch, "track and chord timeline differ in length");
  }
  PolyTrack out = to_poly(track);
  std::mt19937_64 rng(policy.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int i = 0; i < track.length(); ++i) {
    const StepState& s = track.steps[static_cast<std::size_t>(i)];
    if (!s.is_pitch()) continue;
    const double draw = unit(rng);
    if (!(draw < column_chord_probability(s.midi(), i, policy, track.meter))) continue;

    const PitchClassSet tones = realize_pitch_classes(chords.chord_at(i));
    std::vector<int> added;
    for (int q = s.midi() - 1; q > s.midi() - 12 && q >= 0; --q) {
      if (static_cast<int>(added.size()) >= policy.max_added_notes) break;
      if (tones.contains(q)) added.push_back(q);
    }
    const int len = note_length(track, i);
    for (int q : added) {
      out.steps[static_cast<std::size_t>(i)].push_back({q, true});
      for (int j = i + 1; j < i + len; ++j) out.steps[static_cast<std::size_t>(j)].push_back({q, false});
    }
  }
  return out;
}

Arrangement integrate(const MelodyTrack& lead, const MelodyTrack& secondary, const MelodyTrack& simplified,
                      const MelodyTrack& harmonic, const ChordTimeline& chords, double tau,
                      const ColumnChordPolicy& policy) {
  validate(lead);
  validate(harmonic);
  if (harmonic.length() != lead.length() || chords.total_steps() != lead.length()) {
    throw Error(ErrorCode::LengthMismatch, "integration inputs differ in length");
  }
  Arrangement arr;
  arr.lead = lead;
  arr.left_hand = harmonic;
  arr.chords = chords;
  arr.meter = lead.meter;
  arr.bar_sources = choose_right_hand_sources(lead, tau);
  arr.right_hand = add_column_chords(assemble_right_hand(lead, secondary, simplified, tau), chords, policy);
  validate(arr);
  return arr;
}

}  // namespace popgen
