/**
 * @file harmony_hmm.h
 * @brief Decoration HMM: hidden states are observed (add, omit) tuples,
 *        observations are (chord type, duration, root connection).
 *
 * Emission is the product of three factors, p(type | d) p(duration | d)
 * p(prev interval, next interval | d). Decoding returns the exact top-N paths
 * (list Viterbi), which are then re-ranked by a style-fit score.
 */

#ifndef POPGEN_HARMONY_HMM_H
#define POPGEN_HARMONY_HMM_H

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popgen/chord.h"

namespace popgen {

/// Duration buckets in 16ths: {1-2, 3-4, 5-8, 9-16, >16}.
inline constexpr int kDurationBuckets = 5;
int duration_bucket(int steps);

/// Signed root movement folded to [-5, 6] (the tritone folds to +6).
int fold_interval(PitchClass from, PitchClass to);

/// 12 folded intervals plus the sequence-boundary symbol.
inline constexpr int kIntervalSymbols = 13;
inline constexpr int kBoundarySymbol = 12;
inline constexpr int kConnectionSymbols = kIntervalSymbols * kIntervalSymbols;
int interval_symbol(std::optional<int> folded);

struct ChordObservation {
  PitchClass root;
  ChordType type = ChordType::Maj;
  int duration_bucket = 0;
  std::optional<int> prev_interval;
  std::optional<int> next_interval;

  /// Joint (prev, next) category index in [0, kConnectionSymbols).
  int connection_symbol() const;
  bool operator==(const ChordObservation&) const = default;
};

struct DecorationState {
  Decorations deco;
  int id = 0;
};

struct ObservedSequence {
  std::vector<ChordObservation> observations;
  std::vector<Decorations> states;
};

/// Throws EmptyProgression.
ObservedSequence extract_observation_sequence(std::span<const Chord> progression);

/// Dense row-major probability table.
class ProbTable {
 public:
  ProbTable() = default;
  ProbTable(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}
  static ProbTable from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int r, int c) { return data_[index(r, c)]; }
  double at(int r, int c) const { return data_[index(r, c)]; }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_),
            static_cast<std::size_t>(cols_)};
  }
  std::vector<std::vector<double>> to_rows() const;
  bool operator==(const ProbTable&) const = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

class DecorationHmm {
 public:
  /// Validates shapes, strictly positive entries and stochastic rows (1e-9).
  DecorationHmm(std::vector<Decorations> states, std::vector<double> initial, ProbTable transition,
                ProbTable emit_type, ProbTable emit_duration, ProbTable emit_connection,
                double smoothing_alpha);

  int state_count() const { return static_cast<int>(states_.size()); }
  DecorationState state(int id) const;
  const std::vector<Decorations>& states() const { return states_; }
  std::optional<int> find_state(const Decorations& deco) const;

  const std::vector<double>& initial() const { return initial_; }
  const ProbTable& transition() const { return transition_; }
  const ProbTable& emit_type() const { return emit_type_; }
  const ProbTable& emit_duration() const { return emit_duration_; }
  const ProbTable& emit_connection() const { return emit_connection_; }
  double smoothing_alpha() const { return alpha_; }

  double log_initial(int s) const { return log_initial_[static_cast<std::size_t>(s)]; }
  double log_transition(int from, int to) const { return log_transition_.at(from, to); }

  bool operator==(const DecorationHmm& other) const;

 private:
  friend double emission_log_prob(const DecorationHmm&, const ChordObservation&, int);

  std::vector<Decorations> states_;
  std::vector<double> initial_;
  ProbTable transition_;
  ProbTable emit_type_;
  ProbTable emit_duration_;
  ProbTable emit_connection_;
  double alpha_ = 1.0;

  std::vector<double> log_initial_;
  ProbTable log_transition_;
  ProbTable log_emit_type_;
  ProbTable log_emit_duration_;
  ProbTable log_emit_connection_;
};

using ChordCorpus = std::vector<std::vector<Chord>>;

/// Add-alpha smoothed relative frequencies. Throws EmptyCorpus / InvalidParams.
DecorationHmm train(const ChordCorpus& corpus, double alpha = 1.0);

/// Throws UnknownState for an id outside the inventory.
double emission_log_prob(const DecorationHmm& model, const ChordObservation& obs, int state_id);

/// log initial + transitions + emissions along a state path.
double path_log_likelihood(const DecorationHmm& model, std::span<const ChordObservation> obs,
                           std::span<const int> path);

struct ScoredPath {
  std::vector<int> states;
  double log_score = 0.0;
};

/// Exact N-best paths, best first. Throws EmptyObservation / InvalidParams.
std::vector<ScoredPath> viterbi_top_n(const DecorationHmm& model, std::span<const ChordObservation> obs, int n);

struct StyleWeights {
  double w_ll = 1.0;
  double w_change = 0.5;
  double w_rep = 0.2;
  DecorationWeights change_weights;
};

/// "pop" or "jazz"; throws ConfigError otherwise.
StyleWeights style_profile(std::string_view name);

/// w_ll * loglik - w_change * sum of decoration changes - w_rep * adjacent repeats.
double style_fit_score(std::span<const Chord> progression, std::span<const Decorations> decorated,
                       const DecorationHmm& model, const StyleWeights& weights);

struct DecorationOutcome {
  std::vector<Chord> chords;
  int chosen_rank = 0;  ///< 0-based rank of the chosen path in the N-best list
  double style_score = 0.0;
  double log_likelihood = 0.0;
  std::vector<double> candidate_scores;  ///< style score per N-best path (rank order)
};

DecorationOutcome decorate_progression_detailed(const DecorationHmm& model, std::span<const Chord> progression,
                                                int n, const StyleWeights& weights);
std::vector<Chord> decorate_progression(const DecorationHmm& model, std::span<const Chord> progression, int n,
                                        const StyleWeights& weights);

/// Versioned JSON document (format "popgen.decoration_hmm", version 1).
std::string serialize_hmm(const DecorationHmm& model);
DecorationHmm parse_hmm(std::string_view json_text);
void save_hmm(const DecorationHmm& model, const std::filesystem::path& path);
DecorationHmm load_hmm(const std::filesystem::path& path);

}  // namespace popgen

#endif  // POPGEN_HARMONY_HMM_H
