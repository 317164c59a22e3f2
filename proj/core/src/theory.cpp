#include "kzchain/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kzchain/schedule.hpp"

namespace kz {

double predict_density(double b_per_ns, double t_a_ns) {
  if (b_per_ns <= 0.0 || t_a_ns <= 0.0)
    throw std::invalid_argument("predict_density: b and t_a must be > 0");
  return 1.0 / (std::sqrt(t_a_ns) * kTwoPi * std::sqrt(2.0 * b_per_ns));
}

double lz_rate(double b_per_ns, int L) {
  if (b_per_ns <= 0.0 || L <= 0) throw std::invalid_argument("lz_rate: positive inputs required");
  const double pi = 0.5 * kTwoPi;
  return 2.0 * pi * pi * pi * b_per_ns / (static_cast<double>(L) * L);
}

double predict_lz(double b_per_ns, int L, double t_a_ns) {
  if (t_a_ns < 0.0) throw std::invalid_argument("predict_lz: t_a must be >= 0");
  return 1.0 - std::exp(-lz_rate(b_per_ns, L) * t_a_ns);
}

std::array<double, 2> cumulant_ratio_targets() {
  return {2.0 - std::sqrt(2.0), 4.0 * (1.0 - 3.0 / std::sqrt(2.0) + 2.0 / std::sqrt(3.0))};
}

namespace {

FitResult linear_fit(const std::vector<std::pair<double, double>>& xy) {
  const int n = static_cast<int>(xy.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw std::runtime_error("fit: degenerate abscissae");
  FitResult out;
  out.n_points = n;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sxx * sy - sx * sxy) / det;
  double ss = 0.0;
  for (const auto& [x, y] : xy) {
    const double r = y - (out.slope * x + out.intercept);
    ss += r * r;
  }
  const double sigma2 = n > 2 ? ss / (n - 2) : 0.0;
  out.slope_var = sigma2 * n / det;
  out.intercept_var = sigma2 * sxx / det;
  out.covar = -sigma2 * sx / det;
  return out;
}

}  // namespace

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points,
                        std::optional<std::pair<double, double>> window) {
  std::vector<std::pair<double, double>> xy;
  double lo = window ? window->first : 0.0;
  double hi = window ? window->second : std::numeric_limits<double>::infinity();
  for (const auto& [t, y] : points) {
    if (t < lo || t > hi) continue;
    if (t <= 0.0 || y <= 0.0)
      throw std::invalid_argument("fit_power_law: values must be positive");
    xy.emplace_back(std::log(t), std::log(y));
  }
  if (xy.size() < 3) throw std::runtime_error("fit_power_law: fewer than 3 points in window");
  FitResult out = linear_fit(xy);
  out.window_lo = lo;
  out.window_hi = hi;
  return out;
}

FitResult fit_lz_exponent(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& [t, p] : points) {
    if (p < 0.1 || p > 0.9) continue;
    xy.emplace_back(t, std::log(1.0 - p));
  }
  if (xy.size() < 3) throw std::runtime_error("fit_lz_exponent: fewer than 3 points in window");
  FitResult out = linear_fit(xy);
  out.window_lo = 0.1;
  out.window_hi = 0.9;
  return out;
}

}  // namespace kz
