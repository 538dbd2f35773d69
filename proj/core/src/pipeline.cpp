/**
 * @file pipeline.cpp
 * @brief Config and file formats, corpus ingestion and the end-to-end run.
 */

#include "popgen/pipeline.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "io_util.h"
#include "popgen/error.h"
#include "popgen/midi.h"
#include "popgen/seed.h"

namespace popgen {

namespace {

using nlohmann::json;

constexpr std::string_view kConfigFormat = "popgen.pipeline_config";
constexpr std::string_view kPatternFormat = "popgen.pattern_library";
constexpr std::string_view kReportFormat = "popgen.pipeline_report";
constexpr int kFormatVersion = 1;

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

template <class F>
auto run_stage(std::string_view name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), "stage " + std::string(name) + ": " + strip_code(e));
  }
}

std::vector<std::string> split_ws(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_number(const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<int> to_int(const std::string& tok) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) return std::nullopt;
  return std::stoi(tok);
}

// ---- JSON helpers ----

json pattern_to_json(const PatternSpec& pattern) {
  json arr = json::array();
  for (const auto& o : pattern.offsets) arr.push_back(o ? json(*o) : json(nullptr));
  return arr;
}

PatternSpec pattern_from_json(const json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::ConfigError, "pattern must be an array of offsets");
  PatternSpec out;
  for (const auto& v : arr) {
    if (v.is_null()) {
      out.offsets.emplace_back(std::nullopt);
    } else if (v.is_number_integer()) {
      out.offsets.emplace_back(v.get<int>());
    } else {
      throw Error(ErrorCode::ConfigError, "pattern offsets must be integers or null");
    }
  }
  return out;
}

json layer_to_json(const LayerSpec& layer) {
  if (const auto* s = std::get_if<SarmaParams>(&layer)) {
    return {{"type", "sarma"},          {"phi", s->phi},       {"theta", s->theta},
            {"seasonal_phi", s->seasonal_phi}, {"seasonal_theta", s->seasonal_theta}, {"season", s->season},
            {"sigma", s->sigma},        {"burn_in", s->burn_in}};
  }
  if (const auto* w = std::get_if<WhiteNoiseLayer>(&layer)) return {{"type", "white_noise"}, {"sigma", w->sigma}};
  return {{"type", "zero"}};
}

LayerSpec layer_from_json(const json& j) {
  const std::string type = j.value("type", "sarma");
  if (type == "zero") return ZeroLayer{};
  if (type == "white_noise") return WhiteNoiseLayer{j.value("sigma", 0.3)};
  if (type != "sarma") throw Error(ErrorCode::ConfigError, "unknown layer type '" + type + "'");
  SarmaParams s;
  s.phi = j.value("phi", s.phi);
  s.theta = j.value("theta", s.theta);
  s.seasonal_phi = j.value("seasonal_phi", s.seasonal_phi);
  s.seasonal_theta = j.value("seasonal_theta", s.seasonal_theta);
  s.season = j.value("season", s.season);
  s.sigma = j.value("sigma", s.sigma);
  s.burn_in = j.value("burn_in", s.burn_in);
  return s;
}

json quantize_to_json(const QuantizeConfig& q) {
  return {{"eta", q.eta}, {"sigma_q", q.sigma_q}, {"low", q.low}, {"high", q.high}, {"stochastic", q.stochastic}};
}

QuantizeConfig quantize_from_json(const json& j, QuantizeConfig q) {
  q.eta = j.value("eta", q.eta);
  q.sigma_q = j.value("sigma_q", q.sigma_q);
  q.low = j.value("low", q.low);
  q.high = j.value("high", q.high);
  q.stochastic = j.value("stochastic", q.stochastic);
  return q;
}

json importance_to_json(const ImportanceWeights& w) {
  return {{"downbeat", w.downbeat},
          {"duration", w.duration},
          {"extremum", w.extremum},
          {"passing", w.passing},
          {"repetition", w.repetition}};
}

ImportanceWeights importance_from_json(const json& j, ImportanceWeights w) {
  w.downbeat = j.value("downbeat", w.downbeat);
  w.duration = j.value("duration", w.duration);
  w.extremum = j.value("extremum", w.extremum);
  w.passing = j.value("passing", w.passing);
  w.repetition = j.value("repetition", w.repetition);
  return w;
}

json profile_to_json(const GeneratorProfile& profile) {
  json j;
  json layers = json::array();
  for (const LayerSpec& l : profile.layers) layers.push_back(layer_to_json(l));
  j["layers"] = layers;
  j["quantize"] = quantize_to_json(profile.quantize);
  if (const auto* c = std::get_if<ConstantTrend>(&profile.trend)) j["anchor"] = c->anchor;
  if (const auto* b = std::get_if<BassPatternTrend>(&profile.trend)) {
    j["pattern"] = pattern_to_json(b->pattern);
    j["bass_floor"] = b->bass_floor;
  }
  if (profile.kind == MelodyKind::Simplified) {
    j["density"] = profile.density;
    j["importance"] = importance_to_json(profile.importance);
  }
  return j;
}

GeneratorProfile profile_from_json(const json& j, GeneratorProfile profile, const PatternLibrary& patterns) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "profile must be an object");
  if (j.contains("layers")) {
    profile.layers.clear();
    for (const auto& l : j.at("layers")) profile.layers.push_back(layer_from_json(l));
  }
  if (j.contains("quantize")) profile.quantize = quantize_from_json(j.at("quantize"), profile.quantize);
  if (auto* c = std::get_if<ConstantTrend>(&profile.trend)) c->anchor = j.value("anchor", c->anchor);
  if (auto* b = std::get_if<BassPatternTrend>(&profile.trend)) {
    b->bass_floor = j.value("bass_floor", b->bass_floor);
    if (j.contains("pattern")) {
      const json& pat = j.at("pattern");
      if (pat.is_string()) {
        const auto it = patterns.find(pat.get<std::string>());
        if (it == patterns.end()) {
          throw Error(ErrorCode::ConfigError, "unknown pattern '" + pat.get<std::string>() + "'");
        }
        b->pattern = it->second;
      } else {
        b->pattern = pattern_from_json(pat);
      }
    }
  }
  profile.density = j.value("density", profile.density);
  if (j.contains("importance")) profile.importance = importance_from_json(j.at("importance"), profile.importance);
  return profile;
}

double tau_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::ConfigError, "tau must be a number, \"inf\" or \"-inf\"");
}

json tau_to_json(double tau) {
  if (std::isinf(tau)) return tau > 0 ? "inf" : "-inf";
  return tau;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void check_exists(const std::filesystem::path& path, std::string_view what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::ConfigError, std::string(what) + " '" + path.string() + "' does not exist");
  }
}

json labels(std::span<const Chord> chords) {
  json arr = json::array();
  for (const Chord& c : chords) arr.push_back({{"label", render_chord_symbol(c)}, {"duration", c.duration}});
  return arr;
}

std::string build_report(const PipelineConfig& cfg, const PipelineResult& r, const StageSeeds& seeds) {
  json doc;
  doc["format"] = kReportFormat;
  doc["version"] = kFormatVersion;
  doc["seed"] = cfg.seed;
  doc["stage_seeds"] = {{"lead", seeds.lead},
                        {"secondary", seeds.secondary},
                        {"harmonic", seeds.harmonic},
                        {"column_chords", seeds.column_chords}};
  doc["layer_seeds"] = {{"lead", r.lead.layer_seeds},
                        {"secondary", r.secondary.layer_seeds},
                        {"harmonic", r.harmonic.layer_seeds}};
  doc["phrase"] = {{"bars", cfg.phrase.bars},
                   {"beats_per_bar", cfg.phrase.meter.beats_per_bar},
                   {"n", cfg.phrase.n()},
                   {"p", cfg.phrase.p}};
  doc["implementation_choices"] = {{"tempo_bpm", cfg.tempo_bpm},
                                   {"key", "as written in the progression"},
                                   {"sections", 1}};
  doc["progression"] = labels(r.input);
  doc["decorated_progression"] = labels(r.decorated);
  if (r.decoration) {
    doc["decoration"] = {{"style", cfg.style},
                         {"top_n", cfg.top_n},
                         {"chosen_rank", r.decoration->chosen_rank},
                         {"style_score", r.decoration->style_score},
                         {"log_likelihood", r.decoration->log_likelihood},
                         {"candidate_scores", r.decoration->candidate_scores}};
  } else {
    doc["decoration"] = nullptr;
  }
  json bars = json::array();
  for (std::size_t b = 0; b < r.arrangement.bar_sources.size(); ++b) {
    bars.push_back({{"bar", b},
                    {"smoothness", bar_smoothness(r.lead.track, static_cast<int>(b))},
                    {"source", r.arrangement.bar_sources[b] == RightHandSource::Secondary ? "secondary" : "simplified"}});
  }
  doc["tau"] = tau_to_json(cfg.tau);
  doc["bars"] = bars;
  doc["tracks"] = {{"lead", to_string(r.lead.track)},
                   {"secondary", to_string(r.secondary.track)},
                   {"simplified", to_string(r.simplified)},
                   {"harmonic", to_string(r.harmonic.track)}};
  doc["onset_counts"] = {{"lead", onset_count(r.lead.track)},
                         {"secondary", onset_count(r.secondary.track)},
                         {"simplified", onset_count(r.simplified)},
                         {"harmonic", onset_count(r.harmonic.track)}};
  return doc.dump(1) + "\n";
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  if (cfg.phrase.bars < 1 || cfg.phrase.meter.beats_per_bar < 1) {
    throw Error(ErrorCode::ConfigError, "phrase needs at least one bar of at least one beat");
  }
  try {
    check_layer_shape(cfg.phrase.n(), cfg.phrase.p);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, "phrase shape: " + strip_code(e));
  }
  const std::pair<const GeneratorProfile*, MelodyKind> profiles[] = {{&cfg.lead, MelodyKind::Lead},
                                                                     {&cfg.secondary, MelodyKind::Secondary},
                                                                     {&cfg.harmonic, MelodyKind::Harmonic},
                                                                     {&cfg.simplified, MelodyKind::Simplified}};
  for (const auto& [profile, kind] : profiles) {
    const std::string name(melody_kind_name(kind));
    if (profile->kind != kind) throw Error(ErrorCode::ConfigError, name + " profile has the wrong kind");
    if (profile->p() != cfg.phrase.p) {
      throw Error(ErrorCode::ConfigError, name + " profile has " + std::to_string(profile->p()) +
                                              " layers, phrase p is " + std::to_string(cfg.phrase.p));
    }
    try {
      validate(*profile);
      if (const auto* b = std::get_if<BassPatternTrend>(&profile->trend)) validate(b->pattern, cfg.phrase.meter);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, name + " profile: " + strip_code(e));
    }
  }
  if (cfg.top_n < 1) throw Error(ErrorCode::ConfigError, "top_n must be at least 1");
  if (!(cfg.tempo_bpm > 0.0) || !std::isfinite(cfg.tempo_bpm)) {
    throw Error(ErrorCode::ConfigError, "tempo must be positive");
  }
  if (std::isnan(cfg.tau)) throw Error(ErrorCode::ConfigError, "tau is NaN");
  style_profile(cfg.style);
  const ColumnChordPolicy& cc = cfg.column_chords;
  if (cc.max_added_notes < 0 || cc.range_low >= cc.range_high) {
    throw Error(ErrorCode::ConfigError, "column-chord policy needs max_added_notes >= 0 and a non-empty range");
  }
}

PatternLibrary builtin_patterns() {
  PatternLibrary lib;
  lib["alberti"] = alberti_pattern();
  lib["arpeggio"] = PatternSpec{{0, 4, 7, 12}};
  lib["walking"] = PatternSpec{{0, 0, 0, 0, 4, 4, 4, 4, 7, 7, 7, 7, 9, 9, 9, 9}};
  lib["pulse"] = PatternSpec{{0, std::nullopt, 7, std::nullopt}};
  return lib;
}

PatternLibrary parse_pattern_library(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("pattern library is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kPatternFormat) {
      throw Error(ErrorCode::FormatError, "not a pattern library");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::FormatError, "unsupported pattern library version");
    }
    PatternLibrary lib;
    for (const auto& [name, arr] : doc.at("patterns").items()) {
      PatternSpec spec = pattern_from_json(arr);
      validate(spec);
      lib[name] = std::move(spec);
    }
    return lib;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed pattern library: ") + e.what());
  }
}

PatternLibrary load_pattern_library(const std::filesystem::path& path) {
  return parse_pattern_library(detail::read_file(path));
}

std::string serialize_pattern_library(const PatternLibrary& library) {
  json doc;
  doc["format"] = kPatternFormat;
  doc["version"] = kFormatVersion;
  json pats = json::object();
  for (const auto& [name, spec] : library) pats[name] = pattern_to_json(spec);
  doc["patterns"] = pats;
  return doc.dump(1) + "\n";
}

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", std::string(kConfigFormat)) != kConfigFormat) {
      throw Error(ErrorCode::ConfigError, "not a pipeline config");
    }
    if (doc.value("version", kFormatVersion) != kFormatVersion) {
      throw Error(ErrorCode::ConfigError, "unsupported config version");
    }
    PipelineConfig cfg;
    if (doc.contains("phrase")) {
      const json& ph = doc.at("phrase");
      cfg.phrase.bars = ph.value("bars", cfg.phrase.bars);
      cfg.phrase.meter.beats_per_bar = ph.value("beats_per_bar", cfg.phrase.meter.beats_per_bar);
      if (cfg.phrase.bars < 1 || cfg.phrase.meter.beats_per_bar < 1) {
        throw Error(ErrorCode::ConfigError, "phrase needs at least one bar of at least one beat");
      }
      cfg.phrase.p = ph.value("p", std::min(6, max_layer_depth(cfg.phrase.n())));
    }
    const int p = cfg.phrase.p;
    if (p < 1) throw Error(ErrorCode::ConfigError, "phrase p must be at least 1");

    PatternLibrary patterns = builtin_patterns();
    if (doc.contains("pattern_library")) {
      for (auto& [name, spec] : load_pattern_library(resolve(base_dir, doc.at("pattern_library").get<std::string>()))) {
        patterns[name] = spec;
      }
    }

    if (doc.contains("progression")) cfg.progression = resolve(base_dir, doc.at("progression").get<std::string>());
    cfg.style = doc.value("style", cfg.style);
    if (doc.contains("hmm_model") && !doc.at("hmm_model").is_null()) {
      cfg.hmm_model = resolve(base_dir, doc.at("hmm_model").get<std::string>());
    }
    cfg.top_n = doc.value("top_n", cfg.top_n);
    if (doc.contains("pitch_context") && !doc.at("pitch_context").is_null()) {
      const std::string pc = doc.at("pitch_context").get<std::string>();
      if (pc != "rule-based") cfg.pitch_context = resolve(base_dir, pc);
    }
    cfg.lead = profile_from_json(doc.value("lead", json::object()), default_lead_profile(p), patterns);
    cfg.secondary = profile_from_json(doc.value("secondary", json::object()), default_secondary_profile(p), patterns);
    cfg.harmonic = profile_from_json(doc.value("harmonic", json::object()), default_harmonic_profile(p), patterns);
    cfg.simplified =
        profile_from_json(doc.value("simplified", json::object()), default_simplified_profile(p), patterns);
    if (doc.contains("tau")) cfg.tau = tau_from_json(doc.at("tau"));
    if (doc.contains("column_chords")) {
      const json& cc = doc.at("column_chords");
      cfg.column_chords.w_pitch = cc.value("w_pitch", cfg.column_chords.w_pitch);
      cfg.column_chords.w_metric = cc.value("w_metric", cfg.column_chords.w_metric);
      cfg.column_chords.bias = cc.value("bias", cfg.column_chords.bias);
      cfg.column_chords.max_added_notes = cc.value("max_added_notes", cfg.column_chords.max_added_notes);
      cfg.column_chords.range_low = cc.value("range_low", cfg.column_chords.range_low);
      cfg.column_chords.range_high = cc.value("range_high", cfg.column_chords.range_high);
    }
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.tempo_bpm = doc.value("tempo_bpm", cfg.tempo_bpm);
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  PipelineConfig cfg = parse_pipeline_config(detail::read_file(path), path.parent_path());
  if (cfg.progression.empty()) throw Error(ErrorCode::ConfigError, "config names no progression file");
  check_exists(cfg.progression, "progression");
  if (cfg.hmm_model) check_exists(*cfg.hmm_model, "HMM model");
  if (cfg.pitch_context) check_exists(*cfg.pitch_context, "pitch-context model");
  return cfg;
}

std::string serialize_pipeline_config(const PipelineConfig& cfg) {
  json doc;
  doc["format"] = kConfigFormat;
  doc["version"] = kFormatVersion;
  doc["phrase"] = {{"bars", cfg.phrase.bars}, {"beats_per_bar", cfg.phrase.meter.beats_per_bar}, {"p", cfg.phrase.p}};
  doc["progression"] = cfg.progression.generic_string();
  doc["style"] = cfg.style;
  doc["hmm_model"] = cfg.hmm_model ? json(cfg.hmm_model->generic_string()) : json(nullptr);
  doc["top_n"] = cfg.top_n;
  doc["pitch_context"] = cfg.pitch_context ? cfg.pitch_context->generic_string() : std::string("rule-based");
  doc["lead"] = profile_to_json(cfg.lead);
  doc["secondary"] = profile_to_json(cfg.secondary);
  doc["harmonic"] = profile_to_json(cfg.harmonic);
  doc["simplified"] = profile_to_json(cfg.simplified);
  doc["tau"] = tau_to_json(cfg.tau);
  const ColumnChordPolicy& cc = cfg.column_chords;
  doc["column_chords"] = {{"w_pitch", cc.w_pitch},
                          {"w_metric", cc.w_metric},
                          {"bias", cc.bias},
                          {"max_added_notes", cc.max_added_notes},
                          {"range_low", cc.range_low},
                          {"range_high", cc.range_high}};
  doc["seed"] = cfg.seed;
  doc["tempo_bpm"] = cfg.tempo_bpm;
  return doc.dump(1) + "\n";
}

std::vector<Chord> parse_progression(std::string_view text, std::optional<int> expected_steps) {
  std::vector<Chord> chords;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tokens;
    for (const std::string& tok : split_ws(line)) {
      if (tok != "/") tokens.push_back(tok);
    }
    if (tokens.size() % 2 != 0) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected '<label> <duration>' pairs");
    }
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
      const auto dur = to_int(tokens[i + 1]);
      if (!dur || *dur < 1) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": bad duration '" + tokens[i + 1] + "'");
      }
      try {
        chords.push_back(parse_chord_symbol(tokens[i], *dur));
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + strip_code(e));
      }
    }
  }
  if (chords.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": no chords in progression");
  if (expected_steps) {
    int total = 0;
    for (const Chord& c : chords) total += c.duration;
    if (total != *expected_steps) {
      throw Error(ErrorCode::DurationMismatch, "durations sum to " + std::to_string(total) + ", phrase has " +
                                                   std::to_string(*expected_steps) + " steps");
    }
  }
  return chords;
}

std::vector<Chord> load_progression(const std::filesystem::path& path, std::optional<int> expected_steps) {
  return parse_progression(detail::read_file(path), expected_steps);
}

std::string render_progression(std::span<const Chord> chords) {
  std::string out;
  for (const Chord& c : chords) out += render_chord_symbol(c) + " " + std::to_string(c.duration) + "\n";
  return out;
}

IngestedFile parse_annotation(std::string_view text, const std::filesystem::path& origin) {
  IngestedFile file;
  file.path = origin;
  double bpm = 120.0;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(std::string_view(t).substr(1));
      if (body.rfind("tempo:", 0) == 0) {
        const auto v = to_number(trim(std::string_view(body).substr(6)));
        if (!v || *v <= 0.0) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad tempo");
        bpm = *v;
      }
      continue;
    }
    const auto tokens = split_ws(t);
    if (tokens.size() != 3) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected '<start> <end> <label>'");
    }
    const auto start = to_number(tokens[0]);
    const auto end = to_number(tokens[1]);
    if (!start || !end || *end < *start) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad segment times");
    }
    if (tokens[2] == "N" || tokens[2] == "X") {
      ++file.no_chord_segments;
      continue;
    }
    const int steps = std::max(1, static_cast<int>(std::lround((*end - *start) * bpm / 60.0 * kStepsPerBeat)));
    try {
      file.chords.push_back(parse_chord_symbol(tokens[2], steps));
    } catch (const Error&) {
      ++file.skipped_labels;
    }
  }
  return file;
}

IngestedCorpus ingest_chord_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::NoFilesFound, "'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".lab" || ext == ".txt") paths.push_back(entry.path());
  }
  if (paths.empty()) throw Error(ErrorCode::NoFilesFound, "no annotation files under '" + dir.string() + "'");
  std::sort(paths.begin(), paths.end());

  IngestedCorpus corpus;
  for (const auto& path : paths) {
    try {
      IngestedFile file = parse_annotation(detail::read_file(path), path);
      corpus.skipped_labels += file.skipped_labels;
      if (file.chords.empty()) {
        corpus.failures.emplace_back(path, "no usable chord labels");
        continue;
      }
      corpus.progressions.push_back(file.chords);
      corpus.files.push_back(std::move(file));
    } catch (const Error& e) {
      corpus.failures.emplace_back(path, e.what());
    }
  }
  return corpus;
}

StageSeeds stage_seeds(uint64_t master) {
  return {derive_seed(master, SeedStage::Lead), derive_seed(master, SeedStage::Secondary),
          derive_seed(master, SeedStage::Harmonic), derive_seed(master, SeedStage::ColumnChords)};
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  run_stage("config", [&] { validate(cfg); });
  const auto progression = run_stage("progression", [&] { return load_progression(cfg.progression, cfg.phrase.n()); });
  std::optional<DecorationHmm> hmm;
  if (cfg.hmm_model) hmm = run_stage("model", [&] { return load_hmm(*cfg.hmm_model); });
  const PitchContextModel pitch_model = cfg.pitch_context
                                            ? run_stage("model", [&] { return load_pitch_context(*cfg.pitch_context); })
                                            : PitchContextModel::rule_based();
  return run_pipeline(cfg, progression, hmm ? &*hmm : nullptr, pitch_model);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, std::span<const Chord> progression, const DecorationHmm* hmm,
                            const PitchContextModel& pitch_model) {
  run_stage("config", [&] { validate(cfg); });
  const int n = cfg.phrase.n();
  const Meter meter = cfg.phrase.meter;
  const StageSeeds seeds = stage_seeds(cfg.seed);

  PipelineResult r;
  r.input.assign(progression.begin(), progression.end());
  run_stage("progression", [&] {
    if (ChordTimeline(r.input).total_steps() != n) {
      throw Error(ErrorCode::DurationMismatch, "progression does not cover the phrase");
    }
  });

  run_stage("decorate", [&] {
    if (hmm != nullptr) {
      r.decoration = decorate_progression_detailed(*hmm, r.input, cfg.top_n, style_profile(cfg.style));
      r.decorated = r.decoration->chords;
    } else {
      r.decorated = r.input;
    }
  });
  const ChordTimeline chords = run_stage("decorate", [&] { return ChordTimeline(r.decorated); });

  auto lead_task = std::async(std::launch::async, [&] {
    return run_stage("lead", [&] { return generate_line(cfg.lead, chords, n, pitch_model, seeds.lead, meter); });
  });
  auto secondary_task = std::async(std::launch::async, [&] {
    return run_stage("secondary",
                     [&] { return generate_line(cfg.secondary, chords, n, pitch_model, seeds.secondary, meter); });
  });
  auto harmonic_task = std::async(std::launch::async, [&] {
    return run_stage("harmonic",
                     [&] { return generate_line(cfg.harmonic, chords, n, pitch_model, seeds.harmonic, meter); });
  });
  r.lead = lead_task.get();
  r.secondary = secondary_task.get();
  r.harmonic = harmonic_task.get();

  r.simplified = run_stage("simplify", [&] {
    MelodyTrack t = generate_simplified(cfg.simplified, r.lead.track);
    validate(t);
    return t;
  });

  r.arrangement = run_stage("integrate", [&] {
    ColumnChordPolicy policy = cfg.column_chords;
    policy.seed = seeds.column_chords;
    return integrate(r.lead.track, r.secondary.track, r.simplified, r.harmonic.track, chords, cfg.tau, policy);
  });
  r.midi = run_stage("export", [&] { return render_midi(r.arrangement, cfg.tempo_bpm); });
  r.report = run_stage("report", [&] { return build_report(cfg, r, seeds); });
  return r;
}

void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& midi_path) {
  detail::write_file(midi_path, std::string(result.midi.begin(), result.midi.end()));
  std::filesystem::path report = midi_path;
  report.replace_extension(".json");
  detail::write_file(report, result.report);
}

}  // namespace popgen
