/**
 * @file sarma.h
 * @brief Seasonal ARMA(1,1)x(1,1)_s simulation and sample ACF/PACF.
 *
 * Model: (1 - phi B)(1 - Phi B^s) z_t = (1 + theta B)(1 + Theta B^s) w_t,
 * w_t ~ N(0, sigma^2), zero-initialized history.
 */

#ifndef POPGEN_SARMA_H
#define POPGEN_SARMA_H

#include <cstdint>
#include <span>
#include <vector>

namespace popgen {

struct SarmaParams {
  double phi = 0.0;
  double theta = 0.0;
  double seasonal_phi = 0.0;
  double seasonal_theta = 0.0;
  int season = 4;
  double sigma = 1.0;
  int burn_in = 200;

  bool operator==(const SarmaParams&) const = default;
};

/// Throws NonStationaryParams when |phi| or |Phi| >= 1, InvalidParams for the
/// other field constraints.
void validate(const SarmaParams& params);

/// Returns the last `length` values of burn_in + length recursion steps.
std::vector<double> simulate(const SarmaParams& params, int length, uint64_t seed);

/// i.i.d. N(0, sigma^2); same draws as simulate() with zero coefficients and no burn-in.
std::vector<double> white_noise(double sigma, int length, uint64_t seed);

/// Sample autocorrelation for lags 0..max_lag.
std::vector<double> acf(std::span<const double> series, int max_lag);
/// Partial autocorrelation for lags 1..max_lag (index 0 holds lag 1),
/// via Durbin-Levinson on the sample ACF.
std::vector<double> pacf(std::span<const double> series, int max_lag);
/// Durbin-Levinson on a given autocorrelation sequence (rho[0] == 1).
std::vector<double> pacf_from_acf(std::span<const double> rho);

struct SeriesStats {
  std::vector<double> acf;   ///< lags 0..L
  std::vector<double> pacf;  ///< lags 1..L
};

SeriesStats analyze_series(std::span<const double> series, int max_lag);

/// One full-length stochastic layer k of a p-layer, n-step phrase: a SARMA
/// draw with one value per layer-k grid point, zeroed on the layer-(k-1)
/// grid and held to length n.
std::vector<double> generate_layer(const SarmaParams& params, int p, int n, int k, uint64_t seed);

/// Same shape as generate_layer from an already-drawn grid series.
std::vector<double> shape_layer(std::span<const double> grid_values, int p, int n, int k);

}  // namespace popgen

#endif  // POPGEN_SARMA_H
