#include <gtest/gtest.h>

#include <set>

#include "generators.h"
#include "popgen/chord.h"
#include "popgen/error.h"

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

Decorations adds(std::initializer_list<std::pair<int, int>> entries) {
  Decorations d;
  for (auto [slot, off] : entries) d.add[static_cast<std::size_t>(slot)] = off;
  return d;
}

TEST(PitchClass, RejectsOutOfRangeAndWraps) {
  EXPECT_EQ(code_of([] { PitchClass(12); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { PitchClass(-1); }), ErrorCode::InvalidParams);
  EXPECT_EQ(PitchClass::wrap(-1).value(), 11);
  EXPECT_EQ(PitchClass::wrap(25).value(), 1);
}

TEST(ChordType, IntervalMapIsInjective) {
  std::set<std::vector<int>> seen;
  for (ChordType t : kAllChordTypes) {
    const auto iv = chord_type_intervals(t);
    EXPECT_EQ(iv.front(), 0);
    EXPECT_TRUE(seen.insert(std::vector<int>(iv.begin(), iv.end())).second) << chord_type_name(t);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(ParseChordSymbol, DirectMapping) {
  const Chord c = parse_chord_symbol("C:maj", 4);
  EXPECT_EQ(c.root.value(), 0);
  EXPECT_EQ(c.type, ChordType::Maj);
  EXPECT_TRUE(c.decorations.empty());
  EXPECT_EQ(c.bass.value(), 0);
  EXPECT_EQ(c.duration, 4);
}

TEST(ParseChordSymbol, SlashSetsBass) {
  const Chord c = parse_chord_symbol("E:min7/G");
  EXPECT_EQ(c.root.value(), 4);
  EXPECT_EQ(c.type, ChordType::Min7);
  EXPECT_TRUE(c.decorations.empty());
  EXPECT_EQ(c.bass.value(), 7);
}

TEST(ParseChordSymbol, ExtensionBecomesAdd) {
  const Chord c = parse_chord_symbol("C:maj(9)");
  EXPECT_EQ(c.type, ChordType::Maj);
  EXPECT_EQ(c.decorations, adds({{0, 0}}));
}

TEST(ParseChordSymbol, SuspensionsCanonicalize) {
  const Chord sus4 = parse_chord_symbol("G:sus4");
  EXPECT_EQ(sus4.type, ChordType::Maj);
  EXPECT_TRUE(sus4.decorations.omits(Degree::Third));
  EXPECT_EQ(sus4.decorations.add_offset(Degree::Eleventh), 0);
  EXPECT_EQ(realize_pitch_classes(sus4), PitchClassSet::of({7, 0, 2}));

  const Chord sus2 = parse_chord_symbol("D:sus2");
  EXPECT_EQ(realize_pitch_classes(sus2), PitchClassSet::of({2, 4, 9}));
}

TEST(ParseChordSymbol, RicherTypesReduceToSeventhPlusAdds) {
  const Chord c = parse_chord_symbol("G:9");
  EXPECT_EQ(c.type, ChordType::Dom7);
  EXPECT_EQ(c.decorations.add_offset(Degree::Ninth), 0);
  EXPECT_EQ(parse_chord_symbol("C:maj(7)").type, ChordType::Maj7);
  EXPECT_EQ(parse_chord_symbol("C:maj(b7)").type, ChordType::Dom7);
  EXPECT_EQ(parse_chord_symbol("A:min(b7)").type, ChordType::Min7);
}

TEST(ParseChordSymbol, GrammarDefaultsAndIntervalBass) {
  EXPECT_EQ(parse_chord_symbol("F#"), make_chord(PitchClass(6), ChordType::Maj));
  EXPECT_EQ(parse_chord_symbol("Bb:7").root.value(), 10);
  EXPECT_EQ(parse_chord_symbol("C:7/b7").bass.value(), 10);
  EXPECT_EQ(parse_chord_symbol("C:maj/3").bass.value(), 4);
  EXPECT_EQ(parse_chord_symbol("C:maj(*5)").decorations.omits(Degree::Fifth), true);
}

TEST(ParseChordSymbol, Errors) {
  EXPECT_EQ(code_of([] { parse_chord_symbol(""); }), ErrorCode::MalformedSymbol);
  EXPECT_EQ(code_of([] { parse_chord_symbol("H:maj"); }), ErrorCode::MalformedSymbol);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:maj(9"); }), ErrorCode::MalformedSymbol);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:maj(x)"); }), ErrorCode::MalformedSymbol);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:"); }), ErrorCode::MalformedSymbol);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:blues"); }), ErrorCode::UnsupportedChordType);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:(b3,5)"); }), ErrorCode::UnsupportedChordType);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:maj(omit9)"); }), ErrorCode::UnsupportedChordType);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:maj(omit1,omit3,omit5)"); }), ErrorCode::EmptyChord);
  EXPECT_EQ(code_of([] { parse_chord_symbol("C:maj", 0); }), ErrorCode::InvariantViolation);
}

TEST(RealizePitchClasses, MajorTriad) {
  EXPECT_EQ(realize_pitch_classes(parse_chord_symbol("C:maj")), PitchClassSet::of({0, 4, 7}));
}

TEST(RealizePitchClasses, OmitRootOfEm7GivesGMajor) {
  const Chord c = apply_omit(parse_chord_symbol("E:min7"), Degree::Root);
  EXPECT_EQ(realize_pitch_classes(c), PitchClassSet::of({7, 11, 2}));
  EXPECT_EQ(realize_pitch_classes(c), realize_pitch_classes(parse_chord_symbol("G:maj")));
}

TEST(RealizePitchClasses, AddEleventhGivesAddFour) {
  const Chord c = apply_add(parse_chord_symbol("C:maj"), Degree::Eleventh, 0);
  EXPECT_EQ(realize_pitch_classes(c), PitchClassSet::of({0, 4, 5, 7}));
}

TEST(ApplyAdd, SharpElevenOnMajorSeventh) {
  const Chord c = apply_add(parse_chord_symbol("C:maj7"), Degree::Eleventh, +1);
  const PitchClassSet set = realize_pitch_classes(c);
  EXPECT_TRUE(set.contains(6));
  EXPECT_FALSE(set.contains(2));  // ninth absent
  EXPECT_EQ(set, PitchClassSet::of({0, 4, 7, 11, 6}));
  EXPECT_EQ(render_chord_symbol(c), "C:maj7(#11)");
}

TEST(ApplyAdd, IdempotentAndReplacing) {
  const Chord once = apply_add(parse_chord_symbol("C:maj"), Degree::Ninth, 0);
  EXPECT_EQ(apply_add(once, Degree::Ninth, 0), once);
  const Chord flat = apply_add(once, Degree::Ninth, -1);
  EXPECT_EQ(flat.decorations.add_offset(Degree::Ninth), -1);
  EXPECT_EQ(flat.decorations.add_count(), 1);
}

TEST(ApplyAdd, Errors) {
  const Chord c = parse_chord_symbol("C:maj");
  EXPECT_EQ(code_of([&] { apply_add(c, Degree::Third, 0); }), ErrorCode::InvalidDegree);
  EXPECT_EQ(code_of([&] { apply_add(c, Degree::Ninth, 3); }), ErrorCode::InvalidDegree);
  EXPECT_EQ(code_of([&] { apply_add(c, Degree::Ninth, -3); }), ErrorCode::InvalidDegree);
}

TEST(ApplyOmit, ThirdOfEm7) {
  const Chord c = apply_omit(parse_chord_symbol("E:min7"), Degree::Third);
  EXPECT_EQ(render_chord_symbol(c), "E:min7(omit3)");
  EXPECT_EQ(realize_pitch_classes(c), PitchClassSet::of({4, 11, 2}));
}

TEST(ApplyOmit, AbsentNinthChangesNothing) {
  const Chord em7 = parse_chord_symbol("E:min7");
  const Chord out = apply_omit(em7, Degree::Ninth);
  EXPECT_EQ(realize_pitch_classes(out), realize_pitch_classes(em7));
  EXPECT_EQ(out, em7);
}

TEST(ApplyOmit, LastPitchIsRefused) {
  const Chord c = apply_omit(apply_omit(parse_chord_symbol("C:maj"), Degree::Root), Degree::Third);
  EXPECT_EQ(code_of([&] { apply_omit(c, Degree::Fifth); }), ErrorCode::EmptyChord);
}

TEST(DecorationDistance, WeightTable) {
  const Chord c = parse_chord_symbol("C:maj");
  EXPECT_DOUBLE_EQ(decoration_distance(c, c), 0.0);
  EXPECT_DOUBLE_EQ(decoration_distance(c, apply_add(c, Degree::Ninth, 0)), 0.4);
  EXPECT_DOUBLE_EQ(decoration_distance(c, apply_omit(apply_add(c, Degree::Thirteenth, 0), Degree::Fifth)), 0.8);
  // offset change on an existing add counts once
  EXPECT_DOUBLE_EQ(decoration_distance(apply_add(c, Degree::Ninth, 0), apply_add(c, Degree::Ninth, 1)), 0.4);
  EXPECT_EQ(code_of([&] { decoration_distance(c, parse_chord_symbol("C:min")); }), ErrorCode::RootOrTypeMismatch);
  EXPECT_EQ(code_of([&] { decoration_distance(c, parse_chord_symbol("D:maj")); }), ErrorCode::RootOrTypeMismatch);
}

TEST(RenderChordSymbol, Examples) {
  EXPECT_EQ(render_chord_symbol(make_chord(PitchClass(0), ChordType::Maj)), "C:maj");
  Chord em7 = make_chord(PitchClass(4), ChordType::Min7);
  em7.decorations.omit[1] = true;
  EXPECT_EQ(render_chord_symbol(em7), "E:min7(omit3)");
  Chord cmaj7 = make_chord(PitchClass(0), ChordType::Maj7);
  cmaj7.decorations.add[0] = 0;
  cmaj7.bass = PitchClass(7);
  EXPECT_EQ(render_chord_symbol(cmaj7), "C:maj7(9)/G");
  EXPECT_EQ(render_chord_symbol(make_chord(PitchClass(7), ChordType::Dom7)), "G:7");
}

TEST(ChordProperties, RoundTripExhaustiveSingleDecorations) {
  for (int root = 0; root < 12; ++root) {
    for (ChordType t : kAllChordTypes) {
      std::vector<Decorations> singles{Decorations{}};
      for (int slot = 0; slot < 3; ++slot) {
        for (int off = -kMaxAddOffset; off <= kMaxAddOffset; ++off) singles.push_back(adds({{slot, off}}));
        Decorations om;
        om.omit[static_cast<std::size_t>(slot)] = true;
        singles.push_back(om);
      }
      for (const Decorations& d : singles) {
        Chord c = make_chord(PitchClass(root), t, 8);
        c.decorations = d;
        EXPECT_EQ(parse_chord_symbol(render_chord_symbol(c), 8), c) << render_chord_symbol(c);
      }
    }
  }
}

TEST(ChordProperties, RoundTripRandom) {
  testing::Gen g(101);
  for (int i = 0; i < 2000; ++i) {
    const Chord c = g.chord(g.integer(1, 32));
    ASSERT_EQ(parse_chord_symbol(render_chord_symbol(c), c.duration), c) << render_chord_symbol(c);
    const int size = realize_pitch_classes(c).size();
    EXPECT_GE(size, 1);
    EXPECT_LE(size, 7);
  }
}

TEST(ChordProperties, AddOmitIdempotentAndCommuting) {
  testing::Gen g(7);
  const Degree all[] = {Degree::Root, Degree::Third, Degree::Fifth, Degree::Ninth, Degree::Eleventh, Degree::Thirteenth};
  for (int i = 0; i < 500; ++i) {
    const Chord c = make_chord(PitchClass(g.integer(0, 11)), kAllChordTypes[static_cast<std::size_t>(g.integer(0, 9))]);
    const Degree a = all[g.integer(3, 5)];
    const Degree o = all[g.integer(0, 2)];
    const int off = g.integer(-2, 2);
    const Chord ao = apply_omit(apply_add(c, a, off), o);
    const Chord oa = apply_add(apply_omit(c, o), a, off);
    EXPECT_EQ(realize_pitch_classes(ao), realize_pitch_classes(oa));
    EXPECT_EQ(apply_omit(ao, o), ao);
    EXPECT_EQ(apply_add(ao, a, off), ao);
    const Degree a2 = all[g.integer(3, 5)];
    if (a2 != a) {
      EXPECT_EQ(realize_pitch_classes(apply_add(apply_add(c, a, off), a2, 0)),
                realize_pitch_classes(apply_add(apply_add(c, a2, 0), a, off)));
    }
  }
}

TEST(ChordProperties, DistanceIsAMetricOverSmallDecorationSets) {
  std::vector<Decorations> all;
  // every decoration with <= 2 adds and <= 2 omits (offsets restricted to {-1, 0, 1} to bound the sweep)
  for (int mask = 0; mask < 64; ++mask) {
    const int add_bits = mask & 7;
    const int omit_bits = mask >> 3;
    if (__builtin_popcount(add_bits) > 2 || __builtin_popcount(omit_bits) > 2) continue;
    std::vector<Decorations> partial{Decorations{}};
    for (int slot = 0; slot < 3; ++slot) {
      if (!(add_bits >> slot & 1)) continue;
      std::vector<Decorations> next;
      for (const auto& d : partial) {
        for (int off = -1; off <= 1; ++off) {
          Decorations e = d;
          e.add[static_cast<std::size_t>(slot)] = off;
          next.push_back(e);
        }
      }
      partial = next;
    }
    for (auto& d : partial) {
      for (int slot = 0; slot < 3; ++slot) d.omit[static_cast<std::size_t>(slot)] = omit_bits >> slot & 1;
      all.push_back(d);
    }
  }
  for (const auto& a : all) {
    for (const auto& b : all) {
      const double ab = decoration_distance(a, b);
      EXPECT_GE(ab, 0.0);
      EXPECT_EQ(ab, decoration_distance(b, a));
      EXPECT_EQ(ab == 0.0, a == b);
    }
  }
  // triangle inequality on a deterministic subsample of triples
  testing::Gen g(3);
  for (int i = 0; i < 20000; ++i) {
    const auto& a = g.pick(all);
    const auto& b = g.pick(all);
    const auto& c = g.pick(all);
    EXPECT_LE(decoration_distance(a, c), decoration_distance(a, b) + decoration_distance(b, c) + 1e-12);
  }
}

TEST(ChordTimeline, IndexingAndErrors) {
  const ChordTimeline tl({parse_chord_symbol("C:maj", 4), parse_chord_symbol("F:maj", 2)});
  EXPECT_EQ(tl.total_steps(), 6);
  EXPECT_EQ(tl.index_at(3), 0u);
  EXPECT_EQ(tl.index_at(4), 1u);
  EXPECT_EQ(tl.onset_of(1), 4);
  EXPECT_EQ(code_of([&] { tl.index_at(6); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { tl.index_at(-1); }), ErrorCode::LengthMismatch);
}

}  // namespace
}  // namespace popgen
