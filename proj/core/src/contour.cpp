/**
 * @file contour.cpp
 * @brief Layered-signal decomposition.
 */

#include "popgen/contour.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "popgen/error.h"

namespace popgen {

PitchCurve melody_to_pitch_curve(const MelodyTrack& track) {
  PitchCurve curve;
  curve.values.resize(track.steps.size());
  const auto first = std::find_if(track.steps.begin(), track.steps.end(),
                                  [](const StepState& s) { return s.is_pitch(); });
  if (first == track.steps.end()) throw Error(ErrorCode::AllSilence, "melody has no pitched step");

  double held = first->midi();
  for (std::size_t i = 0; i < track.steps.size(); ++i) {
    if (track.steps[i].is_pitch()) held = track.steps[i].midi();
    curve.values[i] = held;
  }
  return curve;
}

int layer_stride(int n, int k) { return n >> k; }

int max_layer_depth(int n) {
  int p = 0;
  while (n > 0 && n % (1 << (p + 1)) == 0) ++p;
  return p;
}

void check_layer_shape(int n, int p) {
  if (p < 1 || p > 30) throw Error(ErrorCode::BadLayerIndex, "layer depth p must be >= 1, got " + std::to_string(p));
  if (n < 1 || n % (1 << p) != 0) {
    throw Error(ErrorCode::LengthNotDivisible,
                "length " + std::to_string(n) + " not divisible by 2^" + std::to_string(p));
  }
}

std::vector<double> hold_upsample(std::span<const double> samples, int stride, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = samples[static_cast<std::size_t>(i / stride)];
  return out;
}

namespace {

std::vector<double> sampled_view(const std::vector<double>& values, int stride) {
  const int n = static_cast<int>(values.size());
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n / stride));
  for (int i = 0; i < n; i += stride) grid.push_back(values[i]);
  return hold_upsample(grid, stride, n);
}

}  // namespace

LayeredSignals decompose(const PitchCurve& curve, int p) {
  const int n = curve.length();
  check_layer_shape(n, p);

  LayeredSignals out;
  out.p = p;
  out.layers.reserve(static_cast<std::size_t>(p) + 1);
  out.layers.emplace_back(static_cast<std::size_t>(n), curve.values.front());

  std::vector<double> previous = out.layers.front();
  for (int k = 1; k <= p; ++k) {
    std::vector<double> view = k == p ? curve.values : sampled_view(curve.values, layer_stride(n, k));
    std::vector<double> layer(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) layer[i] = view[i] - previous[i];
    out.layers.push_back(std::move(layer));
    previous = std::move(view);
  }
  return out;
}

PitchCurve reconstruct(const LayeredSignals& signals) {
  if (signals.layers.empty()) throw Error(ErrorCode::LengthMismatch, "no layers to reconstruct");
  const std::size_t n = signals.layers.front().size();
  PitchCurve out;
  out.values.assign(n, 0.0);
  for (const auto& layer : signals.layers) {
    if (layer.size() != n) throw Error(ErrorCode::LengthMismatch, "layer lengths differ");
    for (std::size_t i = 0; i < n; ++i) out.values[i] += layer[i];
  }
  return out;
}

std::vector<bool> overlap_zero_mask(int p, int n, int k) {
  check_layer_shape(n, p);
  if (k < 1 || k > p) {
    throw Error(ErrorCode::BadLayerIndex, "layer " + std::to_string(k) + " outside 1.." + std::to_string(p));
  }
  const int coarse_stride = layer_stride(n, k - 1);
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; i += coarse_stride) mask[i] = true;
  return mask;
}

void validate_structure(const LayeredSignals& signals, bool constant_trend) {
  const int n = signals.length();
  if (static_cast<int>(signals.layers.size()) != signals.p + 1) {
    throw Error(ErrorCode::InvariantViolation, "expected p+1 layers");
  }
  check_layer_shape(n, signals.p);
  for (const auto& layer : signals.layers) {
    if (static_cast<int>(layer.size()) != n) throw Error(ErrorCode::LengthMismatch, "layer lengths differ");
    for (double v : layer) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvariantViolation, "non-finite layer value");
    }
  }
  const auto [lo, hi] = std::minmax_element(signals.layers[0].begin(), signals.layers[0].end());
  if (constant_trend && *hi - *lo != 0.0) throw Error(ErrorCode::InvariantViolation, "layer 0 is not constant");
  for (int k = 1; k <= signals.p; ++k) {
    const auto mask = overlap_zero_mask(signals.p, n, k);
    for (int i = 0; i < n; ++i) {
      if (mask[i] && signals.layers[k][i] != 0.0) {
        throw Error(ErrorCode::InvariantViolation,
                    "layer " + std::to_string(k) + " nonzero on coarse grid at " + std::to_string(i));
      }
    }
  }
}

void validate(const LayeredSignals& signals, const PitchCurve& source, double tol) {
  validate_structure(signals);
  const PitchCurve sum = reconstruct(signals);
  if (sum.length() != source.length()) throw Error(ErrorCode::LengthMismatch, "source length differs");
  for (int i = 0; i < sum.length(); ++i) {
    if (std::abs(sum.values[i] - source.values[i]) > tol) {
      throw Error(ErrorCode::InvariantViolation, "reconstruction error at " + std::to_string(i));
    }
  }
}

}  // namespace popgen
