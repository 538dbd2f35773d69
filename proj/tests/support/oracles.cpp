#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace popgen::testing {

double emission_product(const DecorationHmm& model, const ChordObservation& obs, int state) {
  return model.emit_type().at(state, chord_type_index(obs.type)) *
         model.emit_duration().at(state, obs.duration_bucket) *
         model.emit_connection().at(state, obs.connection_symbol());
}

std::vector<EnumeratedPath> enumerate_paths(const DecorationHmm& model, std::span<const ChordObservation> obs) {
  const int s = model.state_count();
  const int len = static_cast<int>(obs.size());
  long total = 1;
  for (int i = 0; i < len; ++i) total *= s;

  std::vector<EnumeratedPath> out;
  for (long code = 0; code < total; ++code) {
    EnumeratedPath path;
    long rest = code;
    for (int i = 0; i < len; ++i) {
      path.states.insert(path.states.begin(), static_cast<int>(rest % s));
      rest /= s;
    }
    double prob_log = std::log(model.initial()[static_cast<std::size_t>(path.states[0])]);
    for (int i = 0; i < len; ++i) {
      if (i > 0) prob_log += std::log(model.transition().at(path.states[static_cast<std::size_t>(i - 1)],
                                                            path.states[static_cast<std::size_t>(i)]));
      prob_log += std::log(emission_product(model, obs[static_cast<std::size_t>(i)], path.states[static_cast<std::size_t>(i)]));
    }
    path.score = prob_log;
    out.push_back(std::move(path));
  }
  std::stable_sort(out.begin(), out.end(), [](const EnumeratedPath& a, const EnumeratedPath& b) { return a.score > b.score; });
  return out;
}

EnumeratedPath classical_viterbi(const DecorationHmm& model, std::span<const ChordObservation> obs) {
  const int s = model.state_count();
  const std::size_t len = obs.size();
  std::vector<std::vector<double>> delta(len, std::vector<double>(static_cast<std::size_t>(s)));
  std::vector<std::vector<int>> back(len, std::vector<int>(static_cast<std::size_t>(s), 0));
  for (int j = 0; j < s; ++j) {
    delta[0][static_cast<std::size_t>(j)] =
        std::log(model.initial()[static_cast<std::size_t>(j)]) + std::log(emission_product(model, obs[0], j));
  }
  for (std::size_t t = 1; t < len; ++t) {
    for (int j = 0; j < s; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int i = 0; i < s; ++i) {
        const double v = delta[t - 1][static_cast<std::size_t>(i)] + std::log(model.transition().at(i, j));
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      delta[t][static_cast<std::size_t>(j)] = best + std::log(emission_product(model, obs[t], j));
      back[t][static_cast<std::size_t>(j)] = arg;
    }
  }
  EnumeratedPath path;
  const auto& last = delta[len - 1];
  int state = static_cast<int>(std::max_element(last.begin(), last.end()) - last.begin());
  path.score = last[static_cast<std::size_t>(state)];
  path.states.assign(len, 0);
  for (std::size_t t = len; t-- > 0;) {
    path.states[t] = state;
    state = back[t][static_cast<std::size_t>(state)];
  }
  return path;
}

int argmax_pitch(double c, const Chord& chord, const PitchContextModel& model, double sigma_q, int low, int high) {
  const double pi = std::acos(-1.0);
  int best = -1;
  double best_value = -1.0;
  for (int j = 0; j < 128; ++j) {
    if (j < low || j > high) continue;
    const double density = std::exp(-(j - c) * (j - c) / (2.0 * sigma_q * sigma_q)) / (sigma_q * std::sqrt(2.0 * pi));
    const double value = density * model.weight(j, chord);
    if (value > best_value) {
      best_value = value;
      best = j;
    }
  }
  return best;
}

}  // namespace popgen::testing
