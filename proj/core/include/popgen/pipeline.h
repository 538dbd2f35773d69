/**
 * @file pipeline.h
 * @brief Configuration, file formats, corpus ingestion and the end-to-end run.
 */

#ifndef POPGEN_PIPELINE_H
#define POPGEN_PIPELINE_H

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "popgen/chord.h"
#include "popgen/error_expertise.h"
#include "popgen/generators.h"
#include "popgen/harmony_hmm.h"
#include "popgen/integration.h"

namespace popgen {

struct PhraseSpec {
  int bars = 4;
  Meter meter;
  int p = 6;

  int n() const { return bars * meter.steps_per_bar(); }
  bool operator==(const PhraseSpec&) const = default;
};

struct PipelineConfig {
  PhraseSpec phrase;
  std::filesystem::path progression;
  std::string style = "pop";
  std::optional<std::filesystem::path> hmm_model;  ///< decoration is skipped when absent
  int top_n = 10;
  std::optional<std::filesystem::path> pitch_context;  ///< rule-based prior when absent
  GeneratorProfile lead = default_lead_profile();
  GeneratorProfile secondary = default_secondary_profile();
  GeneratorProfile harmonic = default_harmonic_profile();
  GeneratorProfile simplified = default_simplified_profile();
  double tau = -3.0;
  ColumnChordPolicy column_chords;
  uint64_t seed = 0;
  double tempo_bpm = 90.0;
};

/// Throws ConfigError when the phrase, profiles or policy are inconsistent.
void validate(const PipelineConfig& cfg);

/// Named accompaniment figures; the built-ins are alberti, arpeggio, walking and block.
using PatternLibrary = std::map<std::string, PatternSpec>;
PatternLibrary builtin_patterns();
/// Versioned JSON (format "popgen.pattern_library", version 1); null offsets are rests.
PatternLibrary parse_pattern_library(std::string_view json_text);
PatternLibrary load_pattern_library(const std::filesystem::path& path);
std::string serialize_pattern_library(const PatternLibrary& library);

/// Versioned JSON (format "popgen.pipeline_config", version 1). Missing fields
/// take defaults; relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
/// Also checks that every referenced file exists.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string serialize_pipeline_config(const PipelineConfig& cfg);

/// One `<label> <duration>` per line, `#` starts a comment. Throws
/// ParseError naming the line, and DurationMismatch when `expected_steps`
/// is given and the durations do not add up to it.
std::vector<Chord> parse_progression(std::string_view text, std::optional<int> expected_steps = std::nullopt);
std::vector<Chord> load_progression(const std::filesystem::path& path,
                                    std::optional<int> expected_steps = std::nullopt);
std::string render_progression(std::span<const Chord> chords);

/// Result of reading one timestamped annotation file.
struct IngestedFile {
  std::filesystem::path path;
  std::vector<Chord> chords;
  int skipped_labels = 0;
  int no_chord_segments = 0;
};

/// Lines `start end label` in seconds, after optional `# tempo: <bpm>` and
/// `# metre: <beats>/<unit>` headers. Durations round to 16ths (minimum 1).
/// N and X labels are dropped; unparseable labels are counted and skipped.
IngestedFile parse_annotation(std::string_view text, const std::filesystem::path& origin = {});

struct IngestedCorpus {
  ChordCorpus progressions;  ///< files in lexicographic path order
  std::vector<IngestedFile> files;
  std::vector<std::pair<std::filesystem::path, std::string>> failures;
  int skipped_labels = 0;
};

/// Reads every *.lab / *.txt file under `dir`. Throws NoFilesFound when the
/// directory has none; per-file failures are collected.
IngestedCorpus ingest_chord_corpus(const std::filesystem::path& dir);

struct PipelineResult {
  std::vector<Chord> input;
  std::vector<Chord> decorated;
  std::optional<DecorationOutcome> decoration;
  GeneratedLine lead;
  GeneratedLine secondary;
  GeneratedLine harmonic;
  MelodyTrack simplified;
  Arrangement arrangement;
  std::vector<uint8_t> midi;
  std::string report;  ///< JSON
};

/// Stage seeds under the master seed.
struct StageSeeds {
  uint64_t lead = 0;
  uint64_t secondary = 0;
  uint64_t harmonic = 0;
  uint64_t column_chords = 0;
};
StageSeeds stage_seeds(uint64_t master);

/// Runs decoration, the generators, simplification and integration, then
/// renders MIDI and the report. Stage failures rethrow with the stage name
/// prefixed and the original code kept.
PipelineResult run_pipeline(const PipelineConfig& cfg);
/// Same run with already-loaded inputs.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::span<const Chord> progression,
                            const DecorationHmm* hmm, const PitchContextModel& pitch_model);

/// Writes the MIDI file and the report next to it (extension .json).
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& midi_path);

}  // namespace popgen

#endif  // POPGEN_PIPELINE_H
