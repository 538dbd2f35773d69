/**
 * @file harmony_hmm.cpp
 * @brief Decoration HMM training, list Viterbi decoding and style selection.
 */

#include "popgen/harmony_hmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <json.hpp>

#include "io_util.h"
#include "popgen/error.h"

namespace popgen {

namespace {

constexpr std::string_view kHmmFormat = "popgen.decoration_hmm";
constexpr int kHmmVersion = 1;
constexpr double kRowTolerance = 1e-9;

void check_stochastic_row(std::span<const double> row, std::string_view what) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidModel, std::string(what) + " has a non-positive entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowTolerance) {
    throw Error(ErrorCode::InvalidModel, std::string(what) + " row sums to " + std::to_string(sum));
  }
}

void check_table(const ProbTable& table, int rows, int cols, std::string_view what) {
  if (table.rows() != rows || table.cols() != cols) {
    throw Error(ErrorCode::InvalidModel, std::string(what) + " has shape " + std::to_string(table.rows()) + "x" +
                                             std::to_string(table.cols()) + ", expected " + std::to_string(rows) +
                                             "x" + std::to_string(cols));
  }
  for (int r = 0; r < rows; ++r) check_stochastic_row(table.row(r), what);
}

ProbTable log_of(const ProbTable& table) {
  ProbTable out(table.rows(), table.cols());
  for (int r = 0; r < table.rows(); ++r) {
    for (int c = 0; c < table.cols(); ++c) out.at(r, c) = std::log(table.at(r, c));
  }
  return out;
}

/// Add-alpha normalization of a count row.
void smooth_row(std::span<const double> counts, double alpha, std::span<double> out) {
  double total = 0.0;
  for (double c : counts) total += c;
  const double denom = total + alpha * static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = (counts[i] + alpha) / denom;
}

ProbTable smooth_table(const ProbTable& counts, double alpha) {
  ProbTable out(counts.rows(), counts.cols());
  std::vector<double> row(static_cast<std::size_t>(counts.cols()));
  for (int r = 0; r < counts.rows(); ++r) {
    smooth_row(counts.row(r), alpha, row);
    for (int c = 0; c < counts.cols(); ++c) out.at(r, c) = row[static_cast<std::size_t>(c)];
  }
  return out;
}

}  // namespace

int duration_bucket(int steps) {
  if (steps <= 2) return 0;
  if (steps <= 4) return 1;
  if (steps <= 8) return 2;
  if (steps <= 16) return 3;
  return 4;
}

int fold_interval(PitchClass from, PitchClass to) {
  const int d = PitchClass::wrap(to.value() - from.value()).value();
  return d > 6 ? d - 12 : d;
}

int interval_symbol(std::optional<int> folded) { return folded ? *folded + 5 : kBoundarySymbol; }

int ChordObservation::connection_symbol() const {
  return interval_symbol(prev_interval) * kIntervalSymbols + interval_symbol(next_interval);
}

ObservedSequence extract_observation_sequence(std::span<const Chord> progression) {
  if (progression.empty()) throw Error(ErrorCode::EmptyProgression, "progression has no chords");
  ObservedSequence out;
  out.observations.reserve(progression.size());
  out.states.reserve(progression.size());
  for (std::size_t i = 0; i < progression.size(); ++i) {
    const Chord& c = progression[i];
    ChordObservation obs;
    obs.root = c.root;
    obs.type = c.type;
    obs.duration_bucket = duration_bucket(c.duration);
    if (i > 0) obs.prev_interval = fold_interval(progression[i - 1].root, c.root);
    if (i + 1 < progression.size()) obs.next_interval = fold_interval(c.root, progression[i + 1].root);
    out.observations.push_back(obs);
    out.states.push_back(c.decorations);
  }
  return out;
}

ProbTable ProbTable::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  ProbTable t(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < t.rows(); ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != t.cols()) {
      throw Error(ErrorCode::InvalidModel, "ragged table");
    }
    for (int c = 0; c < t.cols(); ++c) t.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return t;
}

std::vector<std::vector<double>> ProbTable::to_rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(rows_));
  for (int r = 0; r < rows_; ++r) {
    const auto span = row(r);
    out.emplace_back(span.begin(), span.end());
  }
  return out;
}

DecorationHmm::DecorationHmm(std::vector<Decorations> states, std::vector<double> initial, ProbTable transition,
                             ProbTable emit_type, ProbTable emit_duration, ProbTable emit_connection,
                             double smoothing_alpha)
    : states_(std::move(states)),
      initial_(std::move(initial)),
      transition_(std::move(transition)),
      emit_type_(std::move(emit_type)),
      emit_duration_(std::move(emit_duration)),
      emit_connection_(std::move(emit_connection)),
      alpha_(smoothing_alpha) {
  const int s = state_count();
  if (s < 1) throw Error(ErrorCode::InvalidModel, "state inventory is empty");
  if (!(alpha_ > 0.0)) throw Error(ErrorCode::InvalidModel, "smoothing alpha must be > 0");
  if (static_cast<int>(initial_.size()) != s) throw Error(ErrorCode::InvalidModel, "initial vector size mismatch");
  check_stochastic_row(initial_, "initial");
  check_table(transition_, s, s, "transition");
  check_table(emit_type_, s, kChordTypeCount, "emit_type");
  check_table(emit_duration_, s, kDurationBuckets, "emit_duration");
  check_table(emit_connection_, s, kConnectionSymbols, "emit_connection");
  for (int i = 1; i < s; ++i) {
    if (!(states_[static_cast<std::size_t>(i - 1)] < states_[static_cast<std::size_t>(i)])) {
      throw Error(ErrorCode::InvalidModel, "state inventory must be strictly ordered and distinct");
    }
  }

  log_initial_.reserve(initial_.size());
  for (double v : initial_) log_initial_.push_back(std::log(v));
  log_transition_ = log_of(transition_);
  log_emit_type_ = log_of(emit_type_);
  log_emit_duration_ = log_of(emit_duration_);
  log_emit_connection_ = log_of(emit_connection_);
}

DecorationState DecorationHmm::state(int id) const {
  if (id < 0 || id >= state_count()) throw Error(ErrorCode::UnknownState, "state id " + std::to_string(id));
  return {states_[static_cast<std::size_t>(id)], id};
}

std::optional<int> DecorationHmm::find_state(const Decorations& deco) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), deco);
  if (it == states_.end() || *it != deco) return std::nullopt;
  return static_cast<int>(std::distance(states_.begin(), it));
}

bool DecorationHmm::operator==(const DecorationHmm& other) const {
  return states_ == other.states_ && initial_ == other.initial_ && transition_ == other.transition_ &&
         emit_type_ == other.emit_type_ && emit_duration_ == other.emit_duration_ &&
         emit_connection_ == other.emit_connection_ && alpha_ == other.alpha_;
}

DecorationHmm train(const ChordCorpus& corpus, double alpha) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no progressions to train on");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidParams, "alpha must be > 0");

  std::vector<ObservedSequence> sequences;
  sequences.reserve(corpus.size());
  std::map<Decorations, int> inventory{{Decorations{}, 0}};
  for (const auto& progression : corpus) {
    if (progression.empty()) continue;
    sequences.push_back(extract_observation_sequence(progression));
    for (const auto& d : sequences.back().states) inventory.emplace(d, 0);
  }
  if (sequences.empty()) throw Error(ErrorCode::EmptyCorpus, "every progression is empty");

  std::vector<Decorations> states;
  states.reserve(inventory.size());
  for (auto& [deco, id] : inventory) {
    id = static_cast<int>(states.size());
    states.push_back(deco);
  }
  const int s = static_cast<int>(states.size());

  std::vector<double> initial_counts(static_cast<std::size_t>(s), 0.0);
  ProbTable transition_counts(s, s);
  ProbTable type_counts(s, kChordTypeCount);
  ProbTable duration_counts(s, kDurationBuckets);
  ProbTable connection_counts(s, kConnectionSymbols);

  for (const auto& seq : sequences) {
    int prev = -1;
    for (std::size_t i = 0; i < seq.states.size(); ++i) {
      const int id = inventory.at(seq.states[i]);
      const ChordObservation& obs = seq.observations[i];
      if (prev < 0) {
        initial_counts[static_cast<std::size_t>(id)] += 1.0;
      } else {
        transition_counts.at(prev, id) += 1.0;
      }
      type_counts.at(id, chord_type_index(obs.type)) += 1.0;
      duration_counts.at(id, obs.duration_bucket) += 1.0;
      connection_counts.at(id, obs.connection_symbol()) += 1.0;
      prev = id;
    }
  }

  std::vector<double> initial(static_cast<std::size_t>(s));
  smooth_row(initial_counts, alpha, initial);
  return DecorationHmm(std::move(states), std::move(initial), smooth_table(transition_counts, alpha),
                       smooth_table(type_counts, alpha), smooth_table(duration_counts, alpha),
                       smooth_table(connection_counts, alpha), alpha);
}

double emission_log_prob(const DecorationHmm& model, const ChordObservation& obs, int state_id) {
  if (state_id < 0 || state_id >= model.state_count()) {
    throw Error(ErrorCode::UnknownState, "state id " + std::to_string(state_id));
  }
  return model.log_emit_type_.at(state_id, chord_type_index(obs.type)) +
         model.log_emit_duration_.at(state_id, obs.duration_bucket) +
         model.log_emit_connection_.at(state_id, obs.connection_symbol());
}

double path_log_likelihood(const DecorationHmm& model, std::span<const ChordObservation> obs,
                           std::span<const int> path) {
  if (obs.size() != path.size()) throw Error(ErrorCode::LengthMismatch, "path and observations differ in length");
  if (obs.empty()) throw Error(ErrorCode::EmptyObservation, "no observations");
  double score = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const int s = path[t];
    if (s < 0 || s >= model.state_count()) throw Error(ErrorCode::UnknownState, "state id " + std::to_string(s));
    score += t == 0 ? model.log_initial(s) : model.log_transition(path[t - 1], s);
    score += emission_log_prob(model, obs[t], s);
  }
  return score;
}

std::vector<ScoredPath> viterbi_top_n(const DecorationHmm& model, std::span<const ChordObservation> obs, int n) {
  if (obs.empty()) throw Error(ErrorCode::EmptyObservation, "no observations to decode");
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be >= 1");

  struct Entry {
    double score;
    int prev_state;
    int prev_rank;
  };
  auto better = [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.prev_state != b.prev_state) return a.prev_state < b.prev_state;
    return a.prev_rank < b.prev_rank;
  };

  const int states = model.state_count();
  const std::size_t keep = static_cast<std::size_t>(n);
  // lists[t][s] holds the best-first partial paths ending in state s at time t
  std::vector<std::vector<std::vector<Entry>>> lists(obs.size(), std::vector<std::vector<Entry>>(static_cast<std::size_t>(states)));

  for (int s = 0; s < states; ++s) {
    lists[0][static_cast<std::size_t>(s)].push_back({model.log_initial(s) + emission_log_prob(model, obs[0], s), -1, -1});
  }

  std::vector<Entry> candidates;
  for (std::size_t t = 1; t < obs.size(); ++t) {
    for (int s = 0; s < states; ++s) {
      candidates.clear();
      const double emit = emission_log_prob(model, obs[t], s);
      for (int p = 0; p < states; ++p) {
        const double step = model.log_transition(p, s) + emit;
        const auto& prev_list = lists[t - 1][static_cast<std::size_t>(p)];
        for (std::size_t r = 0; r < prev_list.size(); ++r) {
          candidates.push_back({prev_list[r].score + step, p, static_cast<int>(r)});
        }
      }
      const std::size_t take = std::min(keep, candidates.size());
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(), better);
      candidates.resize(take);
      lists[t][static_cast<std::size_t>(s)] = candidates;
    }
  }

  // merge the final lists; prev_state/prev_rank here name the final (state, rank)
  candidates.clear();
  const auto& last = lists.back();
  for (int s = 0; s < states; ++s) {
    for (std::size_t r = 0; r < last[static_cast<std::size_t>(s)].size(); ++r) {
      candidates.push_back({last[static_cast<std::size_t>(s)][r].score, s, static_cast<int>(r)});
    }
  }
  const std::size_t take = std::min(keep, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(), better);
  candidates.resize(take);

  std::vector<ScoredPath> out;
  out.reserve(take);
  for (const Entry& end : candidates) {
    ScoredPath path;
    path.log_score = end.score;
    path.states.resize(obs.size());
    int s = end.prev_state;
    int r = end.prev_rank;
    for (std::size_t t = obs.size(); t-- > 0;) {
      path.states[t] = s;
      const Entry& e = lists[t][static_cast<std::size_t>(s)][static_cast<std::size_t>(r)];
      s = e.prev_state;
      r = e.prev_rank;
    }
    out.push_back(std::move(path));
  }
  return out;
}

StyleWeights style_profile(std::string_view name) {
  if (name == "pop") return StyleWeights{1.0, 0.5, 0.2, {}};
  if (name == "jazz") return StyleWeights{1.0, 0.1, 0.3, {}};
  throw Error(ErrorCode::ConfigError, "unknown style profile '" + std::string(name) + "'");
}

namespace {

double style_fit_score_ids(std::span<const Chord> progression, const ObservedSequence& seq,
                           std::span<const int> path, const DecorationHmm& model, const StyleWeights& weights) {
  const double loglik = path_log_likelihood(model, seq.observations, path);
  double change = 0.0;
  int repeats = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Decorations& decorated = model.states()[static_cast<std::size_t>(path[i])];
    change += decoration_distance(progression[i].decorations, decorated, weights.change_weights);
    if (i > 0 && path[i] == path[i - 1]) ++repeats;
  }
  return weights.w_ll * loglik - weights.w_change * change - weights.w_rep * static_cast<double>(repeats);
}

}  // namespace

double style_fit_score(std::span<const Chord> progression, std::span<const Decorations> decorated,
                       const DecorationHmm& model, const StyleWeights& weights) {
  if (progression.size() != decorated.size()) {
    throw Error(ErrorCode::LengthMismatch, "progression and decoration path differ in length");
  }
  const ObservedSequence seq = extract_observation_sequence(progression);
  std::vector<int> path;
  path.reserve(decorated.size());
  for (const Decorations& d : decorated) {
    const auto id = model.find_state(d);
    if (!id) throw Error(ErrorCode::UnknownState, "decoration " + render_decorations(d) + " not in inventory");
    path.push_back(*id);
  }
  return style_fit_score_ids(progression, seq, path, model, weights);
}

DecorationOutcome decorate_progression_detailed(const DecorationHmm& model, std::span<const Chord> progression,
                                                int n, const StyleWeights& weights) {
  const ObservedSequence seq = extract_observation_sequence(progression);
  const std::vector<ScoredPath> paths = viterbi_top_n(model, seq.observations, n);

  DecorationOutcome outcome;
  outcome.chords.assign(progression.begin(), progression.end());
  outcome.chosen_rank = -1;
  outcome.style_score = -std::numeric_limits<double>::infinity();

  for (std::size_t rank = 0; rank < paths.size(); ++rank) {
    const ScoredPath& path = paths[rank];
    const double score = style_fit_score_ids(progression, seq, path.states, model, weights);
    outcome.candidate_scores.push_back(score);

    std::vector<Chord> decorated(progression.begin(), progression.end());
    bool realizable = true;
    for (std::size_t i = 0; i < decorated.size(); ++i) {
      decorated[i].decorations = model.states()[static_cast<std::size_t>(path.states[i])];
      if (realize_pitch_classes(decorated[i]).empty()) realizable = false;
    }
    if (!realizable) continue;
    if (score > outcome.style_score) {
      outcome.style_score = score;
      outcome.chosen_rank = static_cast<int>(rank);
      outcome.log_likelihood = path.log_score;
      outcome.chords = std::move(decorated);
    }
  }
  return outcome;
}

std::vector<Chord> decorate_progression(const DecorationHmm& model, std::span<const Chord> progression, int n,
                                        const StyleWeights& weights) {
  return decorate_progression_detailed(model, progression, n, weights).chords;
}

std::string serialize_hmm(const DecorationHmm& model) {
  nlohmann::json doc;
  doc["format"] = kHmmFormat;
  doc["version"] = kHmmVersion;
  doc["smoothing_alpha"] = model.smoothing_alpha();
  doc["duration_buckets"] = {"1-2", "3-4", "5-8", "9-16", ">16"};
  std::vector<std::string> types;
  for (ChordType t : kAllChordTypes) types.emplace_back(chord_type_name(t));
  doc["chord_types"] = types;
  doc["interval_symbols"] = "index = folded interval + 5 (-5..6), 12 = boundary; connection = prev*13 + next";
  std::vector<std::string> states;
  for (const Decorations& d : model.states()) states.push_back(render_decorations(d));
  doc["states"] = states;
  doc["initial"] = model.initial();
  doc["transition"] = model.transition().to_rows();
  doc["emit_type"] = model.emit_type().to_rows();
  doc["emit_duration"] = model.emit_duration().to_rows();
  doc["emit_connection"] = model.emit_connection().to_rows();
  return doc.dump(1) + "\n";
}

DecorationHmm parse_hmm(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("HMM model is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kHmmFormat) {
      throw Error(ErrorCode::FormatError, "not a decoration HMM document");
    }
    if (doc.at("version").get<int>() != kHmmVersion) {
      throw Error(ErrorCode::FormatError, "unsupported HMM model version");
    }
    std::vector<Decorations> states;
    for (const auto& label : doc.at("states")) states.push_back(parse_decorations(label.get<std::string>()));
    return DecorationHmm(std::move(states), doc.at("initial").get<std::vector<double>>(),
                         ProbTable::from_rows(doc.at("transition").get<std::vector<std::vector<double>>>()),
                         ProbTable::from_rows(doc.at("emit_type").get<std::vector<std::vector<double>>>()),
                         ProbTable::from_rows(doc.at("emit_duration").get<std::vector<std::vector<double>>>()),
                         ProbTable::from_rows(doc.at("emit_connection").get<std::vector<std::vector<double>>>()),
                         doc.at("smoothing_alpha").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed HMM model: ") + e.what());
  }
}

void save_hmm(const DecorationHmm& model, const std::filesystem::path& path) {
  detail::write_file(path, serialize_hmm(model));
}

DecorationHmm load_hmm(const std::filesystem::path& path) { return parse_hmm(detail::read_file(path)); }

}  // namespace popgen
