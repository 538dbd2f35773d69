/**
 * @file contour.h
 * @brief Melody <-> pitch-curve conversion and the dyadic layered-signal
 *        decomposition of a contour.
 *
 * A contour of length n is split into p+1 full-length layers. Layer 0 is the
 * constant anchor (the first value). For 1 <= k < p, x(k) is the curve sampled
 * every n/2^k steps and held (zero-order hold) until the next sample; layer k
 * is x(k) - x(k-1). The finest view x(p) is the curve itself, which is the
 * stride-n/2^p hold whenever 2^p == n. Summing the layers telescopes back to
 * the curve, and layer k vanishes wherever the coarser grid already sampled.
 */

#ifndef POPGEN_CONTOUR_H
#define POPGEN_CONTOUR_H

#include <span>
#include <vector>

#include "popgen/melody_track.h"

namespace popgen {

/// Real-valued pitch curve at 16th-note resolution.
struct PitchCurve {
  std::vector<double> values;

  int length() const { return static_cast<int>(values.size()); }
};

struct LayeredSignals {
  int p = 1;
  /// layers[0] .. layers[p], each of the source length.
  std::vector<std::vector<double>> layers;

  int length() const { return layers.empty() ? 0 : static_cast<int>(layers.front().size()); }
};

/// Pitch -> value; sustain and silence hold the previous value; leading
/// silence takes the first pitch. Throws AllSilence when nothing is pitched.
PitchCurve melody_to_pitch_curve(const MelodyTrack& track);

/// Sample stride of layer k on an n-step phrase: n / 2^k.
int layer_stride(int n, int k);
/// Largest p with n divisible by 2^p (0 when n is odd).
int max_layer_depth(int n);
/// Throws LengthNotDivisible / BadLayerIndex for unusable (n, p).
void check_layer_shape(int n, int p);

LayeredSignals decompose(const PitchCurve& curve, int p);
PitchCurve reconstruct(const LayeredSignals& signals);

/// True at the indices of the layer-(k-1) grid, where layer k must be zero.
std::vector<bool> overlap_zero_mask(int p, int n, int k);

/// Zero-order hold of `samples` (one per grid point at `stride`) to length n.
std::vector<double> hold_upsample(std::span<const double> samples, int stride, int n);

/// Throws InvariantViolation when reconstruction, zero-overlap or layer-0
/// constancy fail against `source` within `tol`.
void validate(const LayeredSignals& signals, const PitchCurve& source, double tol = 1e-9);
/// Zero-overlap and (optionally) layer-0 constancy, without a source curve.
void validate_structure(const LayeredSignals& signals, bool constant_trend = true);

}  // namespace popgen

#endif  // POPGEN_CONTOUR_H
