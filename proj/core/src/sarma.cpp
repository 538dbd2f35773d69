/**
 * @file sarma.cpp
 * @brief SARMA recursion, ACF and Durbin-Levinson PACF.
 */

#include "popgen/sarma.h"

#include <cmath>
#include <random>
#include <string>

#include "popgen/contour.h"
#include "popgen/error.h"

namespace popgen {

void validate(const SarmaParams& params) {
  if (!(std::abs(params.phi) < 1.0) || !(std::abs(params.seasonal_phi) < 1.0)) {
    throw Error(ErrorCode::NonStationaryParams, "AR coefficients must satisfy |phi| < 1 and |Phi| < 1");
  }
  if (!(std::abs(params.theta) <= 1.0) || !(std::abs(params.seasonal_theta) <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "MA coefficients must satisfy |theta| <= 1 and |Theta| <= 1");
  }
  if (params.season < 1) throw Error(ErrorCode::InvalidParams, "season must be >= 1");
  if (!(params.sigma >= 0.0) || !std::isfinite(params.sigma)) {
    throw Error(ErrorCode::InvalidParams, "sigma must be finite and >= 0");
  }
  if (params.burn_in < 0) throw Error(ErrorCode::InvalidParams, "burn_in must be >= 0");
}

std::vector<double> simulate(const SarmaParams& params, int length, uint64_t seed) {
  validate(params);
  if (length < 1) throw Error(ErrorCode::InvalidParams, "length must be >= 1");

  const std::size_t total = static_cast<std::size_t>(params.burn_in) + static_cast<std::size_t>(length);
  const std::size_t s = static_cast<std::size_t>(params.season);
  std::vector<double> z(total, 0.0);
  std::vector<double> w(total, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double phi = params.phi;
  const double big_phi = params.seasonal_phi;
  const double theta = params.theta;
  const double big_theta = params.seasonal_theta;

  auto lag = [](const std::vector<double>& v, std::size_t t, std::size_t h) { return t >= h ? v[t - h] : 0.0; };

  for (std::size_t t = 0; t < total; ++t) {
    w[t] = params.sigma * normal(rng);
    z[t] = phi * lag(z, t, 1) + big_phi * lag(z, t, s) - phi * big_phi * lag(z, t, s + 1) + w[t] +
           theta * lag(w, t, 1) + big_theta * lag(w, t, s) + theta * big_theta * lag(w, t, s + 1);
  }
  return {z.begin() + static_cast<std::ptrdiff_t>(params.burn_in), z.end()};
}

std::vector<double> white_noise(double sigma, int length, uint64_t seed) {
  SarmaParams params;
  params.sigma = sigma;
  params.burn_in = 0;
  return simulate(params, length, seed);
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
  if (max_lag < 0) throw Error(ErrorCode::InvalidParams, "max_lag must be >= 0");
  if (static_cast<int>(series.size()) <= max_lag) {
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(series.size()) + " too short for lag " + std::to_string(max_lag));
  }
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());

  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (denom == 0.0) throw Error(ErrorCode::ConstantSeries, "series has zero variance");

  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  out[0] = 1.0;
  for (int h = 1; h <= max_lag; ++h) {
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(h) < series.size(); ++t) {
      num += (series[t] - mean) * (series[t + static_cast<std::size_t>(h)] - mean);
    }
    out[h] = num / denom;
  }
  return out;
}

std::vector<double> pacf_from_acf(std::span<const double> rho) {
  const int max_lag = static_cast<int>(rho.size()) - 1;
  std::vector<double> out;
  if (max_lag < 1) return out;
  out.reserve(static_cast<std::size_t>(max_lag));

  std::vector<double> prev{rho[1]};  // phi_{1,1}
  out.push_back(rho[1]);
  for (int k = 2; k <= max_lag; ++k) {
    double num = rho[k];
    double den = 1.0;
    for (int j = 1; j < k; ++j) {
      num -= prev[j - 1] * rho[k - j];
      den -= prev[j - 1] * rho[j];
    }
    if (std::abs(den) < 1e-15) {
      // perfectly predictable series; higher lags carry no new information
      out.resize(static_cast<std::size_t>(max_lag), 0.0);
      break;
    }
    const double phi_kk = num / den;
    std::vector<double> next(static_cast<std::size_t>(k));
    for (int j = 1; j < k; ++j) next[j - 1] = prev[j - 1] - phi_kk * prev[k - j - 1];
    next[k - 1] = phi_kk;
    out.push_back(phi_kk);
    prev = std::move(next);
  }
  return out;
}

std::vector<double> pacf(std::span<const double> series, int max_lag) {
  return pacf_from_acf(acf(series, max_lag));
}

SeriesStats analyze_series(std::span<const double> series, int max_lag) {
  SeriesStats stats;
  stats.acf = acf(series, max_lag);
  stats.pacf = pacf_from_acf(stats.acf);
  return stats;
}

std::vector<double> shape_layer(std::span<const double> grid_values, int p, int n, int k) {
  const auto mask = overlap_zero_mask(p, n, k);
  const int stride = layer_stride(n, k);
  if (static_cast<int>(grid_values.size()) != n / stride) {
    throw Error(ErrorCode::LengthMismatch, "layer " + std::to_string(k) + " expects " +
                                               std::to_string(n / stride) + " grid values");
  }
  std::vector<double> grid(grid_values.begin(), grid_values.end());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (mask[g * static_cast<std::size_t>(stride)]) grid[g] = 0.0;
  }
  return hold_upsample(grid, stride, n);
}

std::vector<double> generate_layer(const SarmaParams& params, int p, int n, int k, uint64_t seed) {
  check_layer_shape(n, p);
  if (k < 1 || k > p) throw Error(ErrorCode::BadLayerIndex, "layer index outside 1..p");
  const int points = n / layer_stride(n, k);
  const std::vector<double> draws = simulate(params, points, seed);
  return shape_layer(draws, p, n, k);
}

}  // namespace popgen
