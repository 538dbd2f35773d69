/**
 * @file error_expertise.cpp
 * @brief Pitch-context weights and contour quantization.
 */

#include "popgen/error_expertise.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <json.hpp>

#include "io_util.h"
#include "popgen/error.h"

namespace popgen {

namespace {

constexpr std::string_view kPitchContextFormat = "popgen.pitch_context";
constexpr int kPitchContextVersion = 1;

constexpr std::array<int, 7> kMajorScale = {0, 2, 4, 5, 7, 9, 11};

void check_row(const PitchWeights& row) {
  double sum = 0.0;
  for (double w : row) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidModel, "pitch weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::InvalidModel, "pitch weights must sum to 1");
}

}  // namespace

ChordSignature chord_signature(const Chord& chord) {
  return {chord.type, realize_pitch_classes(chord).relative_to(chord.root).mask()};
}

PitchWeights rule_based_prior(const Chord& chord) {
  const PitchClassSet tones = realize_pitch_classes(chord).relative_to(chord.root);
  PitchWeights row{};
  row.fill(0.05);
  for (int degree : kMajorScale) row[static_cast<std::size_t>(degree)] = 0.3;
  for (int pc : tones.values()) row[static_cast<std::size_t>(pc)] = 1.0;
  double sum = 0.0;
  for (double w : row) sum += w;
  for (double& w : row) w /= sum;
  return row;
}

PitchContextModel PitchContextModel::rule_based() { return PitchContextModel(); }

PitchContextModel::PitchContextModel(std::map<ChordSignature, PitchWeights> rows)
    : mode_(Mode::Learned), rows_(std::move(rows)) {
  for (const auto& [sig, row] : rows_) check_row(row);
}

PitchWeights PitchContextModel::row_for(const Chord& chord) const {
  if (mode_ == Mode::Learned) {
    if (const auto it = rows_.find(chord_signature(chord)); it != rows_.end()) return it->second;
  }
  return rule_based_prior(chord);
}

double PitchContextModel::weight(int midi_pitch, const Chord& chord) const {
  return row_for(chord)[static_cast<std::size_t>(PitchClass::wrap(midi_pitch - chord.root.value()).value())];
}

PitchContextModel train_pitch_context(std::span<const PairedExample> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no paired melodies to train on");
  std::map<ChordSignature, std::array<double, 12>> counts;
  for (const PairedExample& ex : corpus) {
    validate(ex.melody);
    if (ex.melody.length() != ex.chords.total_steps()) {
      throw Error(ErrorCode::LengthMismatch, "melody and chord timeline lengths differ");
    }
    int held = -1;
    for (int i = 0; i < ex.melody.length(); ++i) {
      const StepState& s = ex.melody.steps[static_cast<std::size_t>(i)];
      if (s.is_pitch()) held = s.midi();
      if (s.is_silence()) held = -1;
      const Chord& chord = ex.chords.chord_at(i);
      auto& row = counts[chord_signature(chord)];
      if (held >= 0) row[static_cast<std::size_t>(PitchClass::wrap(held - chord.root.value()).value())] += 1.0;
    }
  }
  std::map<ChordSignature, PitchWeights> rows;
  for (const auto& [sig, c] : counts) {
    double total = 12.0;
    for (double v : c) total += v;
    PitchWeights row{};
    for (std::size_t i = 0; i < 12; ++i) row[i] = (c[i] + 1.0) / total;
    rows.emplace(sig, row);
  }
  return PitchContextModel(std::move(rows));
}

void validate(const QuantizeConfig& cfg) {
  if (!(cfg.eta > 0.0) || !(cfg.eta < 12.0)) throw Error(ErrorCode::InvalidParams, "eta must lie in (0, 12)");
  if (!(cfg.sigma_q > 0.0) || !std::isfinite(cfg.sigma_q)) {
    throw Error(ErrorCode::InvalidParams, "sigma_q must be positive");
  }
  if (cfg.low < 0 || cfg.high > 127 || !(cfg.low < cfg.high)) {
    throw Error(ErrorCode::EmptyRange,
                "pitch range [" + std::to_string(cfg.low) + ", " + std::to_string(cfg.high) + "] is empty");
  }
}

MelodyTrack quantize(const PitchCurve& contour, const ChordTimeline& chords, const PitchContextModel& model,
                     const QuantizeConfig& cfg, const std::vector<bool>& rests, Meter meter) {
  validate(cfg);
  if (contour.length() != chords.total_steps()) {
    throw Error(ErrorCode::LengthMismatch, "contour has " + std::to_string(contour.length()) +
                                               " steps, chord timeline " + std::to_string(chords.total_steps()));
  }
  if (!rests.empty() && static_cast<int>(rests.size()) != contour.length()) {
    throw Error(ErrorCode::LengthMismatch, "rest mask length differs from contour");
  }
  if (contour.length() == 0) throw Error(ErrorCode::EmptyTrack, "empty contour");

  MelodyTrack out;
  out.meter = meter;
  out.steps.reserve(static_cast<std::size_t>(contour.length()));

  std::mt19937_64 rng(cfg.seed);
  const int candidates = cfg.high - cfg.low + 1;
  std::vector<double> log_scores(static_cast<std::size_t>(candidates));
  std::vector<double> probs(static_cast<std::size_t>(candidates));
  const double inv_two_var = 1.0 / (2.0 * cfg.sigma_q * cfg.sigma_q);

  for (int i = 0; i < contour.length(); ++i) {
    if (!rests.empty() && rests[static_cast<std::size_t>(i)]) {
      out.steps.push_back(StepState::silence());
      continue;
    }
    const double c = contour.values[static_cast<std::size_t>(i)];
    if (!std::isfinite(c)) throw Error(ErrorCode::InvariantViolation, "non-finite contour value");
    const bool can_merge = i > 0 && !out.steps.back().is_silence();
    if (can_merge && std::abs(c - contour.values[static_cast<std::size_t>(i - 1)]) < cfg.eta) {
      out.steps.push_back(StepState::sustain());
      continue;
    }

    const PitchWeights row = model.row_for(chords.chord_at(i));
    const int root = chords.chord_at(i).root.value();
    int best = cfg.low;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int j = cfg.low; j <= cfg.high; ++j) {
      const double d = static_cast<double>(j) - c;
      const double score =
          -d * d * inv_two_var + std::log(row[static_cast<std::size_t>(PitchClass::wrap(j - root).value())]);
      log_scores[static_cast<std::size_t>(j - cfg.low)] = score;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }

    if (cfg.stochastic) {
      for (int k = 0; k < candidates; ++k) {
        probs[static_cast<std::size_t>(k)] = std::exp(log_scores[static_cast<std::size_t>(k)] - best_score);
      }
      std::discrete_distribution<int> pick(probs.begin(), probs.end());
      best = cfg.low + pick(rng);
    }
    out.steps.push_back(StepState::pitch(best));
  }
  return out;
}

std::string serialize_pitch_context(const PitchContextModel& model) {
  nlohmann::json doc;
  doc["format"] = kPitchContextFormat;
  doc["version"] = kPitchContextVersion;
  doc["mode"] = model.mode() == PitchContextModel::Mode::Learned ? "learned" : "rule-based";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [sig, weights] : model.rows()) {
    rows.push_back({{"type", std::string(chord_type_name(sig.type))},
                    {"relative_set", PitchClassSet::from_mask(sig.relative_mask).values()},
                    {"weights", weights}});
  }
  doc["rows"] = rows;
  return doc.dump(1) + "\n";
}

PitchContextModel parse_pitch_context(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("pitch-context model is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kPitchContextFormat) {
      throw Error(ErrorCode::FormatError, "not a pitch-context document");
    }
    if (doc.at("version").get<int>() != kPitchContextVersion) {
      throw Error(ErrorCode::FormatError, "unsupported pitch-context version");
    }
    if (doc.at("mode").get<std::string>() == "rule-based") return PitchContextModel::rule_based();
    std::map<ChordSignature, PitchWeights> rows;
    for (const auto& row : doc.at("rows")) {
      const std::string type_name = row.at("type").get<std::string>();
      ChordSignature sig;
      bool found = false;
      for (ChordType t : kAllChordTypes) {
        if (chord_type_name(t) == type_name) {
          sig.type = t;
          found = true;
        }
      }
      if (!found) throw Error(ErrorCode::FormatError, "unknown chord type '" + type_name + "'");
      PitchClassSet set;
      for (int pc : row.at("relative_set").get<std::vector<int>>()) set.insert(PitchClass(pc));
      sig.relative_mask = set.mask();
      rows.emplace(sig, row.at("weights").get<PitchWeights>());
    }
    return PitchContextModel(std::move(rows));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed pitch-context model: ") + e.what());
  }
}

void save_pitch_context(const PitchContextModel& model, const std::filesystem::path& path) {
  detail::write_file(path, serialize_pitch_context(model));
}

PitchContextModel load_pitch_context(const std::filesystem::path& path) {
  return parse_pitch_context(detail::read_file(path));
}

}  // namespace popgen
