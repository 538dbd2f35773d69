#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "generators.h"
#include "popgen/error.h"
#include "popgen/generators.h"
#include "popgen/integration.h"

namespace popgen {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected popgen::Error";
  return ErrorCode::InvariantViolation;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

MelodyTrack bars(std::initializer_list<const char*> texts) {
  std::string all;
  for (const char* t : texts) all += std::string(all.empty() ? "" : " ") + t;
  return track_from_string(all);
}

ChordTimeline c_major(int steps) { return ChordTimeline({parse_chord_symbol("C:maj", steps)}); }

TEST(ToPoly, MapsStates) {
  const PolyTrack p = to_poly(track_from_string("60 - . 62"));
  ASSERT_EQ(p.length(), 4);
  EXPECT_EQ(p.steps[0], (std::vector<PolyEvent>{{60, true}}));
  EXPECT_EQ(p.steps[1], (std::vector<PolyEvent>{{60, false}}));
  EXPECT_TRUE(p.steps[2].empty());
  EXPECT_EQ(p.steps[3], (std::vector<PolyEvent>{{62, true}}));
  EXPECT_NO_THROW(validate(p));
}

TEST(ValidatePoly, RejectsBrokenTracks) {
  PolyTrack dup{{{{60, true}, {60, true}}}, {}};
  EXPECT_EQ(code_of([&] { validate(dup); }), ErrorCode::InvariantViolation);
  PolyTrack dangling{{{{60, true}}, {{62, false}}}, {}};
  EXPECT_EQ(code_of([&] { validate(dangling); }), ErrorCode::InvariantViolation);
  PolyTrack first{{{{60, false}}}, {}};
  EXPECT_EQ(code_of([&] { validate(first); }), ErrorCode::InvariantViolation);
  PolyTrack range{{{{128, true}}}, {}};
  EXPECT_EQ(code_of([&] { validate(range); }), ErrorCode::InvariantViolation);
}

TEST(BarSmoothness, Examples) {
  const MelodyTrack t = bars({"60 - - - 62 - - - 64 - - - 65 - - -", "60 - - - 72 - - - 60 - - - 72 - - -",
                              "67 - - - - - - - - - - - - - - -"});
  EXPECT_NEAR(bar_smoothness(t, 0), -5.0 / 3.0, 1e-12);
  EXPECT_NEAR(bar_smoothness(t, 1), -12.0, 1e-12);
  EXPECT_DOUBLE_EQ(bar_smoothness(t, 2), 0.0);
  EXPECT_EQ(code_of([&] { bar_smoothness(t, 3); }), ErrorCode::BarOutOfRange);
  EXPECT_EQ(code_of([&] { bar_smoothness(t, -1); }), ErrorCode::BarOutOfRange);
}

TEST(AssembleRightHand, GateExtremes) {
  testing::Gen g(61);
  for (int trial = 0; trial < 30; ++trial) {
    const MelodyTrack lead = g.track(64);
    const MelodyTrack secondary = g.track(64);
    const MelodyTrack simplified = simplify(lead, 0.6);
    EXPECT_EQ(assemble_right_hand(lead, secondary, simplified, -kInf), secondary);
    EXPECT_EQ(assemble_right_hand(lead, secondary, simplified, kInf), simplified);
  }
}

TEST(AssembleRightHand, SmoothBarFromSecondaryJumpyBarFromSimplified) {
  const MelodyTrack lead = bars({"60 - - - 61 - - - 62 - - - 63 - - -", "60 - - - 72 - - - 60 - - - 72 - - -"});
  EXPECT_NEAR(bar_smoothness(lead, 0), -1.0, 1e-12);
  const MelodyTrack secondary = bars({"64 - - - - - - - 65 - - - - - - -", "67 - - - - - - - - - - - - - - -"});
  const MelodyTrack simplified = bars({"60 - - - - - - - 62 - - - - - - -", "60 - - - - - - - 72 - - - - - - -"});
  EXPECT_EQ(choose_right_hand_sources(lead, -3.0),
            (std::vector<RightHandSource>{RightHandSource::Secondary, RightHandSource::Simplified}));
  const MelodyTrack out = assemble_right_hand(lead, secondary, simplified, -3.0);
  EXPECT_EQ(to_string(out), "64 - - - - - - - 65 - - - - - - - 60 - - - - - - - 72 - - - - - - -");
}

TEST(AssembleRightHand, RepairsSustainAcrossSourceSwitch) {
  const MelodyTrack lead = bars({"60 - - - 61 - - - 62 - - - 63 - - -", "60 - - - 72 - - - 60 - - - 72 - - -"});
  const MelodyTrack secondary = bars({"64 - - - - - - - - - - - - - - -", "- - - - - - - - - - - - - - - -"});
  const MelodyTrack simplified = bars({"60 - - - - - - - - - - - - - - -", "- - - - 72 - - - - - - - - - - -"});
  // bar 1 comes from simplified, whose opening sustain belongs to 60, but 64 is sounding
  const MelodyTrack out = assemble_right_hand(lead, secondary, simplified, -3.0);
  EXPECT_TRUE(is_valid(out));
  ASSERT_TRUE(out.steps[16].is_pitch());
  EXPECT_EQ(out.steps[16].midi(), 60);
  EXPECT_EQ(code_of([&] { assemble_right_hand(lead, secondary, track_from_string("60"), -3.0); }), ErrorCode::LengthMismatch);
}

TEST(MetricStrength, Levels) {
  EXPECT_DOUBLE_EQ(metric_strength(0), 1.0);
  EXPECT_DOUBLE_EQ(metric_strength(16), 1.0);
  EXPECT_DOUBLE_EQ(metric_strength(4), 0.75);
  EXPECT_DOUBLE_EQ(metric_strength(6), 0.5);
  EXPECT_DOUBLE_EQ(metric_strength(7), 0.25);
  EXPECT_DOUBLE_EQ(metric_strength(12, Meter{3}), 1.0);
}

TEST(ColumnChordProbability, FormulaAndMonotonicity) {
  ColumnChordPolicy policy;
  EXPECT_NEAR(column_chord_probability(66, 0, policy), 0.3 * 0.5 + 0.5 * 1.0, 1e-12);
  EXPECT_NEAR(column_chord_probability(48, 3, policy), 0.5 * 0.25, 1e-12);
  EXPECT_GT(column_chord_probability(70, 0, policy), column_chord_probability(70, 1, policy));
  testing::Gen g(62);
  for (int trial = 0; trial < 200; ++trial) {
    policy.w_metric = g.real(0.01, 1.0);
    policy.w_pitch = g.real(0.0, 1.0);
    policy.bias = g.real(-0.5, 0.0);
    const int pitch = g.integer(48, 84);
    EXPECT_GE(column_chord_probability(pitch, 0, policy), column_chord_probability(pitch, 4, policy));
    EXPECT_GE(column_chord_probability(pitch, 4, policy), column_chord_probability(pitch, 2, policy));
    EXPECT_GE(column_chord_probability(pitch, 2, policy), column_chord_probability(pitch, 1, policy));
  }
  policy.bias = -10.0;
  EXPECT_DOUBLE_EQ(column_chord_probability(84, 0, policy), 0.0);
  policy.bias = 10.0;
  EXPECT_DOUBLE_EQ(column_chord_probability(48, 1, policy), 1.0);
}

TEST(AddColumnChords, NegativeBiasAddsNothing) {
  testing::Gen g(63);
  ColumnChordPolicy policy;
  policy.bias = -10.0;
  for (int trial = 0; trial < 30; ++trial) {
    const MelodyTrack t = g.track(64);
    const ChordTimeline tl(g.progression(64, 4, 16));
    policy.seed = static_cast<uint64_t>(trial);
    EXPECT_EQ(add_column_chords(t, tl, policy), to_poly(t));
  }
}

TEST(AddColumnChords, PositiveBiasAddsChordTonesBelow) {
  testing::Gen g(64);
  ColumnChordPolicy policy;
  policy.bias = 10.0;
  for (int trial = 0; trial < 50; ++trial) {
    const MelodyTrack t = g.track(64);
    const ChordTimeline tl(g.progression(64, 4, 16));
    policy.seed = static_cast<uint64_t>(trial);
    const PolyTrack out = add_column_chords(t, tl, policy);
    ASSERT_NO_THROW(validate(out));
    for (int i = 0; i < 64; ++i) {
      const auto& s = t.steps[static_cast<std::size_t>(i)];
      const auto& col = out.steps[static_cast<std::size_t>(i)];
      if (!s.is_pitch()) continue;
      // oracle: the highest chord tones strictly inside the octave below
      const PitchClassSet tones = realize_pitch_classes(tl.chord_at(i));
      std::vector<int> want;
      for (int q = s.midi() - 1; q > s.midi() - 12 && static_cast<int>(want.size()) < policy.max_added_notes; --q) {
        if (tones.contains(q)) want.push_back(q);
      }
      ASSERT_EQ(col.size(), 1 + want.size());
      EXPECT_EQ(col[0], (PolyEvent{s.midi(), true}));
      for (std::size_t k = 0; k < want.size(); ++k) EXPECT_EQ(col[k + 1], (PolyEvent{want[k], true}));
      const int len = note_length(t, i);
      for (int j = i + 1; j < i + len; ++j) EXPECT_EQ(out.steps[static_cast<std::size_t>(j)].size(), 1 + want.size());
    }
  }
}

TEST(AddColumnChords, ExampleAndErrors) {
  ColumnChordPolicy policy;
  policy.bias = 10.0;
  const PolyTrack out = add_column_chords(track_from_string("72 - 67 ."), c_major(4), policy);
  EXPECT_EQ(out.steps[0], (std::vector<PolyEvent>{{72, true}, {67, true}, {64, true}}));
  EXPECT_EQ(out.steps[1], (std::vector<PolyEvent>{{72, false}, {67, false}, {64, false}}));
  EXPECT_EQ(out.steps[2], (std::vector<PolyEvent>{{67, true}, {64, true}, {60, true}}));
  EXPECT_TRUE(out.steps[3].empty());
  policy.max_added_notes = 0;
  EXPECT_EQ(add_column_chords(track_from_string("72 - 67 ."), c_major(4), policy), to_poly(track_from_string("72 - 67 .")));
  EXPECT_EQ(code_of([&] { add_column_chords(track_from_string("72 -"), c_major(4), policy); }), ErrorCode::LengthMismatch);
}

TEST(AddColumnChords, SeededAndHigherOnStrongBeats) {
  // same pitch everywhere; only metric position varies the acceptance rate
  std::string text;
  for (int i = 0; i < 1024; ++i) text += i ? " 72" : "72";
  const MelodyTrack t = track_from_string(text);
  const ChordTimeline tl = c_major(1024);
  ColumnChordPolicy policy;
  policy.seed = 9;
  EXPECT_EQ(add_column_chords(t, tl, policy), add_column_chords(t, tl, policy));
  const PolyTrack out = add_column_chords(t, tl, policy);
  int strong = 0;
  int weak = 0;
  for (int i = 0; i < 1024; ++i) {
    if (out.steps[static_cast<std::size_t>(i)].size() == 1) continue;
    if (i % 16 == 0) ++strong;
    if (i % 2 == 1) ++weak;
  }
  // acceptance rates: bar start 0.8, sixteenths 0.425
  EXPECT_GT(static_cast<double>(strong) / 64.0, static_cast<double>(weak) / 512.0);
}

TEST(Integrate, DegenerateHeldNotes) {
  const ChordTimeline tl = c_major(64);
  std::string held = "67";
  for (int i = 1; i < 64; ++i) held += " -";
  const MelodyTrack line = track_from_string(held);
  std::string bass = "36";
  for (int i = 1; i < 64; ++i) bass += " -";
  ColumnChordPolicy policy;
  policy.bias = -10.0;
  const Arrangement a = integrate(line, line, line, track_from_string(bass), tl, -3.0, policy);
  EXPECT_NO_THROW(validate(a));
  EXPECT_EQ(a.right_hand, to_poly(line));
  EXPECT_EQ(a.left_hand, track_from_string(bass));
  EXPECT_EQ(a.bar_sources, std::vector<RightHandSource>(4, RightHandSource::Secondary));
}

TEST(Integrate, Errors) {
  const ChordTimeline tl = c_major(16);
  const MelodyTrack a = track_from_string("60 - - - - - - - - - - - - - - -");
  const MelodyTrack short_track = track_from_string("60 - - -");
  EXPECT_EQ(code_of([&] { integrate(a, a, a, short_track, tl, -3.0, {}); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { integrate(a, a, a, a, c_major(32), -3.0, {}); }), ErrorCode::LengthMismatch);
}

TEST(Integrate, FiftySeedSweep) {
  const ChordTimeline tl({parse_chord_symbol("C:maj", 16), parse_chord_symbol("A:min", 16), parse_chord_symbol("F:maj", 16),
                          parse_chord_symbol("G:maj", 16)});
  const auto model = PitchContextModel::rule_based();
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto lead = generate_lead(default_lead_profile(), tl, 64, model, seed);
    const auto sec = generate_secondary(default_secondary_profile(), tl, 64, model, seed + 1000);
    const auto harm = generate_harmonic(default_harmonic_profile(), tl, 64, model, seed + 2000);
    const auto simp = generate_simplified(default_simplified_profile(), lead);
    ColumnChordPolicy policy;
    policy.seed = seed;
    const Arrangement arr = integrate(lead, sec, simp, harm, tl, -3.0, policy);
    EXPECT_NO_THROW(validate(arr));
    EXPECT_EQ(arr.bar_sources, choose_right_hand_sources(lead, -3.0));
    EXPECT_EQ(arr.right_hand.length(), 64);
    // the melody voice of every right-hand column is the assembled line
    const MelodyTrack rh = assemble_right_hand(lead, sec, simp, -3.0);
    for (int i = 0; i < 64; ++i) {
      const int pitch = sounding_pitch(rh, i);
      const auto& col = arr.right_hand.steps[static_cast<std::size_t>(i)];
      if (pitch < 0) {
        EXPECT_TRUE(col.empty());
      } else {
        ASSERT_FALSE(col.empty());
        EXPECT_EQ(col[0].midi, pitch);
        for (std::size_t k = 1; k < col.size(); ++k) EXPECT_LT(col[k].midi, pitch);
      }
    }
  }
}

}  // namespace
}  // namespace popgen
