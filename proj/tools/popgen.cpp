// popgen command-line front end.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "popgen/chord.h"
#include "popgen/contour.h"
#include "popgen/error.h"
#include "popgen/generators.h"
#include "popgen/harmony_hmm.h"
#include "popgen/integration.h"
#include "popgen/midi.h"
#include "popgen/pipeline.h"
#include "popgen/sarma.h"
#include "popgen/seed.h"

namespace {

using namespace popgen;

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

PitchContextModel pitch_model_for(const PipelineConfig& cfg) {
  return cfg.pitch_context ? load_pitch_context(*cfg.pitch_context) : PitchContextModel::rule_based();
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<double> out;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string cell = line.substr(0, line.find(','));
    if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      out.push_back(v);
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": not a number");
    }
  }
  return out;
}

MelodyTrack track_from_midi(const std::string& path, int index) {
  const MidiFile file = read_midi(path);
  if (index < 0 || index >= static_cast<int>(file.tracks.size())) {
    throw Error(ErrorCode::InvalidParams, "track " + std::to_string(index) + " not in file");
  }
  Meter meter;
  meter.beats_per_bar = file.beats_per_bar > 0 ? file.beats_per_bar : 4;
  return notes_to_melody(file.tracks[static_cast<std::size_t>(index)].notes, file.ticks_per_quarter, meter);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chord decoration, melody generation and piano arrangement"};
  app.require_subcommand(1);

  // train-hmm
  std::string corpus_dir;
  std::string model_out = "model.json";
  double alpha = 1.0;
  auto* train_cmd = app.add_subcommand("train-hmm", "Train the decoration HMM from an annotation corpus");
  train_cmd->add_option("corpus-dir", corpus_dir, "Directory of .lab annotation files")->required();
  train_cmd->add_option("-o,--output", model_out, "Model JSON path");
  train_cmd->add_option("--alpha", alpha, "Additive smoothing");

  // decorate
  std::string prog_path;
  std::string model_path;
  std::string style = "pop";
  int top_n = 10;
  auto* decorate_cmd = app.add_subcommand("decorate", "Decorate a chord progression");
  decorate_cmd->add_option("progression", prog_path, "Progression file")->required();
  decorate_cmd->add_option("-m,--model", model_path, "Model JSON")->required();
  decorate_cmd->add_option("--style", style, "Style profile (pop, jazz)");
  decorate_cmd->add_option("-n,--top-n", top_n, "Candidate paths");

  // generate
  std::string kind_name = "lead";
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "Generate one melody line");
  generate_cmd->add_option("--kind", kind_name, "lead, secondary, harmonic or simplified");
  generate_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  generate_cmd->add_option("--seed", seed, "Seed (defaults to the config seed)");
  generate_cmd->add_option("-o,--output", gen_out, "Write the line as a MIDI file");

  // simplify
  std::string midi_in;
  int track_index = 0;
  double density = 0.6;
  std::string simplify_out;
  auto* simplify_cmd = app.add_subcommand("simplify", "Thin out the notes of a MIDI melody");
  simplify_cmd->add_option("midi-in", midi_in, "Input MIDI file")->required();
  simplify_cmd->add_option("--track", track_index, "Track index");
  simplify_cmd->add_option("--density", density, "Fraction of onsets to keep");
  simplify_cmd->add_option("-o,--output", simplify_out, "Output MIDI path");

  // integrate
  std::string integrate_out;
  auto* integrate_cmd = app.add_subcommand("integrate", "Arrange generated lines for two hands (no decoration)");
  integrate_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  integrate_cmd->add_option("-o,--output", integrate_out, "Output MIDI path");

  // pipeline
  std::string pipeline_out = "out.mid";
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full pipeline");
  pipeline_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  pipeline_cmd->add_option("-o,--output", pipeline_out, "Output MIDI path; the report goes next to it");
  pipeline_cmd->add_option("--seed", seed, "Override the master seed");

  // analyze-acf
  std::string series_path;
  int max_lag = 20;
  auto* acf_cmd = app.add_subcommand("analyze-acf", "Print ACF and PACF of a series as CSV");
  acf_cmd->add_option("input", series_path, "CSV (first column) or MIDI file")->required();
  acf_cmd->add_option("--max-lag", max_lag, "Largest lag")->check(CLI::PositiveNumber);
  acf_cmd->add_option("--track", track_index, "MIDI track index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const IngestedCorpus corpus = ingest_chord_corpus(corpus_dir);
      for (const auto& [path, why] : corpus.failures) std::cerr << "skipped " << path.string() << ": " << why << "\n";
      const DecorationHmm model = train(corpus.progressions, alpha);
      save_hmm(model, model_out);
      std::cout << "files " << corpus.files.size() << ", failed " << corpus.failures.size() << ", skipped labels "
                << corpus.skipped_labels << ", states " << model.states().size() << "\n";
      std::cout << "wrote " << model_out << "\n";
    } else if (*decorate_cmd) {
      const auto progression = load_progression(prog_path);
      const DecorationHmm model = load_hmm(model_path);
      const DecorationOutcome out = decorate_progression_detailed(model, progression, top_n, style_profile(style));
      std::cout << render_progression(out.chords);
      std::cout << "# rank " << out.chosen_rank << ", style score " << std::setprecision(10) << out.style_score
                << ", log-likelihood " << out.log_likelihood << "\n";
    } else if (*generate_cmd) {
      PipelineConfig cfg = load_pipeline_config(config_path);
      const uint64_t s = seed.value_or(cfg.seed);
      const auto progression = load_progression(cfg.progression, cfg.phrase.n());
      const ChordTimeline chords(progression);
      const PitchContextModel pm = pitch_model_for(cfg);
      const MelodyKind kind = parse_melody_kind(kind_name);
      const StageSeeds seeds = stage_seeds(s);
      MelodyTrack track;
      switch (kind) {
        case MelodyKind::Lead:
          track = generate_lead(cfg.lead, chords, cfg.phrase.n(), pm, seeds.lead, cfg.phrase.meter);
          break;
        case MelodyKind::Secondary:
          track = generate_secondary(cfg.secondary, chords, cfg.phrase.n(), pm, seeds.secondary, cfg.phrase.meter);
          break;
        case MelodyKind::Harmonic:
          track = generate_harmonic(cfg.harmonic, chords, cfg.phrase.n(), pm, seeds.harmonic, cfg.phrase.meter);
          break;
        case MelodyKind::Simplified:
          track = generate_simplified(
              cfg.simplified, generate_lead(cfg.lead, chords, cfg.phrase.n(), pm, seeds.lead, cfg.phrase.meter));
          break;
      }
      std::cout << to_string(track) << "\n";
      if (!gen_out.empty()) write_bytes(gen_out, render_track_midi(track, cfg.tempo_bpm));
    } else if (*simplify_cmd) {
      const MelodyTrack lead = track_from_midi(midi_in, track_index);
      const MelodyTrack thin = simplify(lead, density);
      std::cout << "onsets " << onset_count(lead) << " -> " << onset_count(thin) << "\n" << to_string(thin) << "\n";
      if (!simplify_out.empty()) write_bytes(simplify_out, render_track_midi(thin, read_midi(midi_in).tempo_bpm));
    } else if (*integrate_cmd) {
      PipelineConfig cfg = load_pipeline_config(config_path);
      const auto progression = load_progression(cfg.progression, cfg.phrase.n());
      const PipelineResult r = run_pipeline(cfg, progression, nullptr, pitch_model_for(cfg));
      for (std::size_t b = 0; b < r.arrangement.bar_sources.size(); ++b) {
        std::cout << "bar " << b << ": "
                  << (r.arrangement.bar_sources[b] == RightHandSource::Secondary ? "secondary" : "simplified") << "\n";
      }
      if (!integrate_out.empty()) write_bytes(integrate_out, r.midi);
    } else if (*pipeline_cmd) {
      PipelineConfig cfg = load_pipeline_config(config_path);
      if (seed) cfg.seed = *seed;
      const PipelineResult r = run_pipeline(cfg);
      write_pipeline_outputs(r, pipeline_out);
      std::cout << render_progression(r.decorated);
      std::cout << "wrote " << pipeline_out << "\n";
    } else if (*acf_cmd) {
      std::vector<double> series;
      if (has_suffix(series_path, ".mid") || has_suffix(series_path, ".midi")) {
        series = melody_to_pitch_curve(track_from_midi(series_path, track_index)).values;
      } else {
        series = read_series_csv(series_path);
      }
      const SeriesStats stats = analyze_series(series, max_lag);
      std::cout << "lag,acf,pacf\n" << std::setprecision(10);
      for (int h = 1; h <= max_lag; ++h) {
        std::cout << h << "," << stats.acf[static_cast<std::size_t>(h)] << ","
                  << stats.pacf[static_cast<std::size_t>(h - 1)] << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
