// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "generators.h"
#include "oracles.h"
#include "popgen/chord.h"
#include "popgen/contour.h"
#include "popgen/error.h"
#include "popgen/error_expertise.h"
#include "popgen/generators.h"
#include "popgen/harmony_hmm.h"
#include "popgen/integration.h"
#include "popgen/midi.h"
#include "popgen/pipeline.h"
#include "popgen/sarma.h"
#include "smf_oracle.h"

namespace {

using namespace popgen;
namespace fs = std::filesystem;

constexpr double kReconstructTol = 1e-9;
constexpr double kViterbiTol = 1e-9;
constexpr double kAcfTol = 0.02;
constexpr int kSeriesLength = 100000;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

Outcome criterion_decomposition() {
  Outcome out;
  testing::Gen g(1001);
  const int sizes[] = {16, 32, 64};
  for (int trial = 0; trial < 1000 && out.ok; ++trial) {
    const int n = sizes[trial % 3];
    const int p = g.integer(1, max_layer_depth(n));
    const PitchCurve curve{g.curve(n, 40.0, 90.0)};
    const LayeredSignals ls = decompose(curve, p);
    const PitchCurve back = reconstruct(ls);
    for (int i = 0; i < n; ++i) {
      if (std::abs(back.values[static_cast<std::size_t>(i)] - curve.values[static_cast<std::size_t>(i)]) > kReconstructTol) {
        out.fail("reconstruction error at trial " + std::to_string(trial));
      }
    }
    for (int k = 1; k <= p; ++k) {
      const auto mask = overlap_zero_mask(p, n, k);
      for (int i = 0; i < n; ++i) {
        if (mask[static_cast<std::size_t>(i)] && ls.layers[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] != 0.0) {
          out.fail("nonzero overlap at trial " + std::to_string(trial));
        }
      }
    }
  }
  if (out.ok) out.detail = "1000 curves, tol 1e-9";
  return out;
}

Outcome criterion_viterbi() {
  Outcome out;
  testing::Gen g(1002);
  for (int trial = 0; trial < 100 && out.ok; ++trial) {
    const int states = g.integer(1, 3);
    const int len = g.integer(1, 5);
    const DecorationHmm model = testing::random_hmm(g, states);
    const auto obs = testing::random_observations(g, len);
    const int total = static_cast<int>(std::lround(std::pow(states, len)));
    const auto paths = viterbi_top_n(model, obs, total);
    const auto oracle = testing::enumerate_paths(model, obs);
    if (paths.size() != oracle.size()) {
      out.fail("path count differs at trial " + std::to_string(trial));
      break;
    }
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (std::abs(paths[i].log_score - oracle[i].score) > kViterbiTol) out.fail("score differs at trial " + std::to_string(trial));
    }
  }
  if (out.ok) out.detail = "100 models, <=3 states, length <=5";
  return out;
}

Outcome criterion_sarma() {
  Outcome out;
  SarmaParams ar;
  ar.phi = 0.5;
  const auto z = simulate(ar, kSeriesLength, 1003);
  const auto r = acf(z, 3);
  char buf[160];
  for (int h = 1; h <= 3; ++h) {
    if (std::abs(r[static_cast<std::size_t>(h)] - std::pow(0.5, h)) > kAcfTol) out.fail("AR(1) acf lag " + std::to_string(h));
  }
  const auto w = simulate(SarmaParams{}, kSeriesLength, 1004);
  const auto q = pacf(w, 3);
  for (int h = 1; h <= 3; ++h) {
    if (std::abs(q[static_cast<std::size_t>(h - 1)]) > kAcfTol) out.fail("white-noise pacf lag " + std::to_string(h));
  }
  std::snprintf(buf, sizeof buf, "acf %.4f %.4f %.4f, wn pacf %.4f %.4f %.4f", r[1], r[2], r[3], q[0], q[1], q[2]);
  if (out.ok) out.detail = buf;
  return out;
}

Outcome criterion_chords() {
  Outcome out;
  if (realize_pitch_classes(apply_add(parse_chord_symbol("C:maj"), Degree::Eleventh, 0)) != PitchClassSet::of({0, 4, 5, 7})) {
    out.fail("add 11th on C:maj");
  }
  const Chord em7 = parse_chord_symbol("E:min7");
  if (realize_pitch_classes(apply_omit(em7, Degree::Root)) != realize_pitch_classes(parse_chord_symbol("G:maj"))) {
    out.fail("omit root on E:min7");
  }
  if (realize_pitch_classes(apply_omit(em7, Degree::Ninth)) != realize_pitch_classes(em7)) out.fail("omit 9th on E:min7");

  int checked = 0;
  for (int root = 0; root < 12; ++root) {
    for (ChordType t : kAllChordTypes) {
      std::vector<Decorations> singles{Decorations{}};
      for (std::size_t slot = 0; slot < 3; ++slot) {
        for (int off = -kMaxAddOffset; off <= kMaxAddOffset; ++off) {
          Decorations d;
          d.add[slot] = off;
          singles.push_back(d);
        }
        Decorations om;
        om.omit[slot] = true;
        singles.push_back(om);
      }
      for (const Decorations& d : singles) {
        Chord c = make_chord(PitchClass(root), t, 8);
        c.decorations = d;
        if (!(parse_chord_symbol(render_chord_symbol(c), 8) == c)) out.fail("round trip " + render_chord_symbol(c));
        ++checked;
      }
    }
  }
  if (out.ok) out.detail = "3 worked cases, " + std::to_string(checked) + " round trips";
  return out;
}

Outcome criterion_quantizer() {
  Outcome out;
  const auto rule = PitchContextModel::rule_based();
  testing::Gen g(1005);
  for (int trial = 0; trial < 1000 && out.ok; ++trial) {
    const int n = 32;
    const ChordTimeline tl(g.progression(n, 2, 16));
    std::vector<double> curve = g.curve(n, 50.0, 80.0);
    for (int i = 1; i < n; ++i) {
      if (g.coin(0.3)) curve[static_cast<std::size_t>(i)] = curve[static_cast<std::size_t>(i - 1)] + g.real(-0.4, 0.4);
    }
    QuantizeConfig cfg;
    cfg.eta = g.real(0.1, 2.0);
    const MelodyTrack t = quantize(PitchCurve{curve}, tl, rule, cfg);
    if (t.steps[0].is_sustain()) out.fail("first step sustained");
    for (int i = 1; i < n; ++i) {
      const bool near = std::abs(curve[static_cast<std::size_t>(i)] - curve[static_cast<std::size_t>(i - 1)]) < cfg.eta;
      if (near != t.steps[static_cast<std::size_t>(i)].is_sustain()) out.fail("merge rule at trial " + std::to_string(trial));
    }
  }

  const Chord c_maj = parse_chord_symbol("C:maj", 1);
  PitchWeights flat;
  flat.fill(1.0 / 12.0);
  const PitchContextModel uniform({{chord_signature(c_maj), flat}});
  QuantizeConfig sharp;
  sharp.sigma_q = 1e-3;
  for (int trial = 0; trial < 1000 && out.ok; ++trial) {
    const double c = g.real(30.0, 100.0);
    const int got = quantize(PitchCurve{{c}}, ChordTimeline({c_maj}), uniform, sharp).steps[0].midi();
    if (got != std::clamp(static_cast<int>(std::lround(c)), sharp.low, sharp.high)) out.fail("rounding at " + std::to_string(c));
  }

  struct BoostCase {
    double contour;
    int boosted_class;
  };
  const BoostCase cases[] = {{60.4, 1}, {64.3, 5}, {67.2, 8}};
  for (const BoostCase& bc : cases) {
    PitchWeights boosted = flat;
    boosted[static_cast<std::size_t>(bc.boosted_class)] = 20.0;
    double sum = 0.0;
    for (double v : boosted) sum += v;
    for (double& v : boosted) v /= sum;
    const PitchContextModel strong({{chord_signature(c_maj), boosted}});
    const int before = quantize(PitchCurve{{bc.contour}}, ChordTimeline({c_maj}), uniform, {}).steps[0].midi();
    const int after = quantize(PitchCurve{{bc.contour}}, ChordTimeline({c_maj}), strong, {}).steps[0].midi();
    if (before % 12 == bc.boosted_class || after % 12 != bc.boosted_class) {
      out.fail("boost case " + std::to_string(bc.contour));
    }
  }
  if (out.ok) out.detail = "1000 merge contours, 1000 rounding draws, 3 boost cases";
  return out;
}

std::vector<testing::OracleNote> grid_notes(const MelodyTrack& t, int channel, int velocity) {
  std::vector<testing::OracleNote> notes;
  for (int s : onset_steps(t)) {
    notes.push_back({channel, t.steps[static_cast<std::size_t>(s)].midi(), velocity, s * 120L, (s + note_length(t, s)) * 120L});
  }
  std::sort(notes.begin(), notes.end());
  return notes;
}

std::vector<testing::OracleNote> grid_notes(const PolyTrack& t, int channel, int velocity) {
  std::vector<testing::OracleNote> notes;
  for (int i = 0; i < t.length(); ++i) {
    for (const PolyEvent& e : t.steps[static_cast<std::size_t>(i)]) {
      if (!e.onset) continue;
      int end = i + 1;
      while (end < t.length()) {
        const auto& col = t.steps[static_cast<std::size_t>(end)];
        if (std::find(col.begin(), col.end(), PolyEvent{e.midi, false}) == col.end()) break;
        ++end;
      }
      notes.push_back({channel, e.midi, velocity, i * 120L, end * 120L});
    }
  }
  std::sort(notes.begin(), notes.end());
  return notes;
}

Outcome criterion_end_to_end() {
  Outcome out;
  const fs::path data = POPGEN_DATA_DIR;
  for (uint64_t seed = 0; seed < 20 && out.ok; ++seed) {
    PipelineConfig cfg = load_pipeline_config(data / "config" / "pipeline.json");
    cfg.seed = seed;
    const PipelineResult a = run_pipeline(cfg);
    const PipelineResult b = run_pipeline(cfg);
    try {
      validate(a.arrangement);
    } catch (const Error& e) {
      out.fail(std::string("seed ") + std::to_string(seed) + ": " + e.what());
    }
    if (a.midi != b.midi || a.report != b.report) out.fail("non-deterministic output for seed " + std::to_string(seed));
    try {
      const auto f = testing::oracle_parse_smf(a.midi);
      if (f.tracks.size() != 3 || f.tracks[0].notes != grid_notes(a.arrangement.lead, 0, 80) ||
          f.tracks[1].notes != grid_notes(a.arrangement.right_hand, 1, 64) ||
          f.tracks[2].notes != grid_notes(a.arrangement.left_hand, 2, 64)) {
        out.fail("MIDI round trip differs for seed " + std::to_string(seed));
      }
    } catch (const std::exception& e) {
      out.fail(e.what());
    }
  }
  if (out.ok) out.detail = "20 seeds, repeat runs byte-identical, SMF round trip exact";
  return out;
}

Outcome criterion_simplify() {
  Outcome out;
  testing::Gen g(1007);
  for (int trial = 0; trial < 200 && out.ok; ++trial) {
    const MelodyTrack lead = g.track(64, 0.3, 0.08);
    const double d = g.real(0.1, 1.0);
    const MelodyTrack s = simplify(lead, d);
    const int before = onset_count(lead);
    const int after = onset_count(s);
    if (after > before) out.fail("onsets increased at trial " + std::to_string(trial));
    if (after > static_cast<int>(std::ceil(d * before))) out.fail("density bound at trial " + std::to_string(trial));
  }
  // planted passing note between downbeat chord tones, transposed and mirrored
  int cases = 0;
  for (int shift = -5; shift <= 6 && out.ok; ++shift) {
    for (int dir : {1, -1}) {
      const int a = 60 + shift;
      const int b = a + 4 * dir;
      const int pass = b + dir;
      const int c = b + 3 * dir;
      MelodyTrack t;
      auto note = [&](int pitch, int len) {
        t.steps.push_back(StepState::pitch(pitch));
        for (int i = 1; i < len; ++i) t.steps.push_back(StepState::sustain());
      };
      note(a, 4);
      note(b, 2);
      note(pass, 2);
      note(c, 4);
      note(a, 4);
      const MelodyTrack s = simplify(t, 0.8);
      const std::vector<int> want{0, 4, 8, 12};
      if (onset_steps(s) != want) out.fail("planted case shift " + std::to_string(shift) + " dir " + std::to_string(dir));
      ++cases;
    }
  }
  if (out.ok) out.detail = "200 random tracks, " + std::to_string(cases) + " planted passing notes";
  return out;
}

Outcome criterion_gate() {
  Outcome out;
  const MelodyTrack lead = track_from_string("60 - - - 62 - - - 64 - - - 65 - - - 60 - - - 72 - - - 60 - - - 72 - - -");
  const MelodyTrack secondary = track_from_string("64 - - - - - - - 65 - - - - - - - 67 - - - - - - - - - - - - - - -");
  const MelodyTrack simplified = track_from_string("60 - - - - - - - 64 - - - - - - - 60 - - - - - - - 72 - - - - - - -");
  if (std::abs(bar_smoothness(lead, 0) + 5.0 / 3.0) > 1e-12 || std::abs(bar_smoothness(lead, 1) + 12.0) > 1e-12) {
    out.fail("smoothness values");
  }
  const auto sources = choose_right_hand_sources(lead, -3.0);
  if (sources != std::vector<RightHandSource>{RightHandSource::Secondary, RightHandSource::Simplified}) out.fail("gate at tau -3");
  const MelodyTrack mixed = assemble_right_hand(lead, secondary, simplified, -3.0);
  if (to_string(mixed) != "64 - - - - - - - 65 - - - - - - - 60 - - - - - - - 72 - - - - - - -") out.fail("assembled bars");
  const double inf = std::numeric_limits<double>::infinity();
  if (assemble_right_hand(lead, secondary, simplified, -inf) != secondary) out.fail("tau -inf");
  if (assemble_right_hand(lead, secondary, simplified, inf) != simplified) out.fail("tau +inf");
  if (out.ok) out.detail = "secondary then simplified at tau -3; single source at tau +-inf";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "decomposition round trip", 5.0, criterion_decomposition},
      {2, "Viterbi oracle equivalence", 10.0, criterion_viterbi},
      {3, "SARMA statistical fidelity", 5.0, criterion_sarma},
      {4, "chord algebra examples", 0.0, criterion_chords},
      {5, "quantizer contract", 0.0, criterion_quantizer},
      {6, "end-to-end determinism and validity", 30.0, criterion_end_to_end},
      {7, "simplification monotonicity", 0.0, criterion_simplify},
      {8, "smoothness gate", 0.0, criterion_gate},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && secs > c.limit_seconds) {
      o.fail("took " + std::to_string(secs) + " s");
    }
    char timing[64];
    if (c.limit_seconds > 0.0) {
      std::snprintf(timing, sizeof timing, "%.3f s, limit %.0f s", secs, c.limit_seconds);
    } else {
      std::snprintf(timing, sizeof timing, "%.3f s", secs);
    }
    std::printf("%s criterion %d: %s (%s) [%s]\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing);
    if (!o.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
