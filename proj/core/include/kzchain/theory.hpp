#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace kz {

// Kink density of the annealed uniform chain: n = t_a^{-1/2} / (2*pi*sqrt(2b)),
// with b in 1/ns and t_a in ns.
double predict_density(double b_per_ns, double t_a_ns);

// Ground-state probability of the finite chain: 1 - P = exp(-a*t_a) with
// a = 2*pi^3*b/L^2.
double predict_lz(double b_per_ns, int L, double t_a_ns);
double lz_rate(double b_per_ns, int L);

// Asymptotic kink-number cumulant ratios (k2/k1, k3/k1):
// 2 - sqrt(2) and 4*(1 - 3/sqrt(2) + 2/sqrt(3)).
std::array<double, 2> cumulant_ratio_targets();

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_var = 0.0;
  double intercept_var = 0.0;
  double covar = 0.0;
  int n_points = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Unweighted least squares of log(y) vs log(x) over points with x inside the
// window (both positive).
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points,
                        std::optional<std::pair<double, double>> window = std::nullopt);

// Fits log(1 - P_GS) = intercept - a*t_a over points with 0.1 <= P_GS <= 0.9;
// the decay rate is -slope.
FitResult fit_lz_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace kz
