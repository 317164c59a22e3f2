#include "kzchain/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kz {

Schedule Schedule::linear(double beta_ghz) {
  if (beta_ghz <= 0.0) throw std::invalid_argument("schedule: beta must be > 0");
  return Schedule(ScheduleKind::Linear, beta_ghz);
}

Schedule Schedule::quadratic(double beta_ghz) {
  if (beta_ghz <= 0.0) throw std::invalid_argument("schedule: beta must be > 0");
  return Schedule(ScheduleKind::Quadratic, beta_ghz);
}

Schedule::Schedule(std::vector<SchedulePoint> points)
    : kind_(ScheduleKind::Tabulated), points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("schedule: need at least two tabulated points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.gamma_ghz < 0.0 || p.jcal_ghz < 0.0)
      throw std::invalid_argument("schedule: negative energy scale in table");
    if (i > 0) {
      const auto& q = points_[i - 1];
      if (p.s <= q.s) throw std::invalid_argument("schedule: s values must be strictly increasing");
      if (p.gamma_ghz > q.gamma_ghz + 1e-12)
        throw std::invalid_argument("schedule: Gamma(s) must be non-increasing");
      if (p.jcal_ghz < q.jcal_ghz - 1e-12)
        throw std::invalid_argument("schedule: Jcal(s) must be non-decreasing");
    }
  }
}

Schedule Schedule::tabulated(std::vector<SchedulePoint> points) {
  return Schedule(std::move(points));
}

Schedule Schedule::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("schedule: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("schedule: empty file " + path);
  // tolerate whitespace / CR in the header
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(),
                              [](char c) { return c == ' ' || c == '\r'; }),
               header.end());
  if (header != "s,gamma_ghz,jcal_ghz")
    throw std::runtime_error("schedule: expected header 's,gamma_ghz,jcal_ghz' in " + path);
  std::vector<SchedulePoint> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    SchedulePoint p{};
    char c1 = 0, c2 = 0;
    if (!(ss >> p.s >> c1 >> p.gamma_ghz >> c2 >> p.jcal_ghz) || c1 != ',' || c2 != ',')
      throw std::runtime_error("schedule: parse error at " + path + ":" + std::to_string(lineno));
    pts.push_back(p);
  }
  return tabulated(std::move(pts));
}

double Schedule::s_min() const {
  return kind_ == ScheduleKind::Tabulated ? points_.front().s : 0.0;
}

double Schedule::s_max() const {
  return kind_ == ScheduleKind::Tabulated ? points_.back().s : 1.0;
}

void Schedule::check_range(double s) const {
  if (s < s_min() - 1e-15 || s > s_max() + 1e-15)
    throw std::out_of_range("schedule: s=" + std::to_string(s) + " outside range [" +
                            std::to_string(s_min()) + "," + std::to_string(s_max()) + "]");
}

std::pair<double, double> Schedule::eval(double s) const {
  check_range(s);
  switch (kind_) {
    case ScheduleKind::Linear:
      return {beta_ * (1.0 - s), beta_ * s};
    case ScheduleKind::Quadratic:
      return {4.0 * beta_ * (1.0 - s) * (1.0 - s), 4.0 * beta_ * s * s};
    case ScheduleKind::Tabulated:
      break;
  }
  auto it = std::lower_bound(points_.begin(), points_.end(), s,
                             [](const SchedulePoint& p, double v) { return p.s < v; });
  if (it == points_.begin()) return {it->gamma_ghz, it->jcal_ghz};
  if (it == points_.end()) return {points_.back().gamma_ghz, points_.back().jcal_ghz};
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (s - lo.s) / (hi.s - lo.s);
  return {lo.gamma_ghz + w * (hi.gamma_ghz - lo.gamma_ghz),
          lo.jcal_ghz + w * (hi.jcal_ghz - lo.jcal_ghz)};
}

double Schedule::gamma(double s) const { return eval(s).first; }
double Schedule::jcal(double s) const { return eval(s).second; }

std::pair<double, double> Schedule::derivatives(double s) const {
  check_range(s);
  switch (kind_) {
    case ScheduleKind::Linear:
      return {-beta_, beta_};
    case ScheduleKind::Quadratic:
      return {-8.0 * beta_ * (1.0 - s), 8.0 * beta_ * s};
    case ScheduleKind::Tabulated:
      break;
  }
  const double h = 1e-4;
  const double lo = std::max(s - h, s_min());
  const double hi = std::min(s + h, s_max());
  const auto [g0, j0] = eval(lo);
  const auto [g1, j1] = eval(hi);
  return {(g1 - g0) / (hi - lo), (j1 - j0) / (hi - lo)};
}

double Schedule::critical_point(double j_mag) const {
  if (j_mag <= 0.0) throw std::invalid_argument("critical_point: |J| must be > 0");
  auto f = [&](double s) { return gamma(s) - jcal(s) * j_mag; };
  double a = s_min(), b = s_max();
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    throw std::runtime_error("critical_point: Gamma - Jcal*|J| does not change sign on the schedule range");
  while (b - a > 1e-12) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

KZConstants Schedule::kz_constants(double j_mag) const {
  const double sc = critical_point(j_mag);
  const auto [g, j] = eval(sc);
  const auto [dg, dj] = derivatives(sc);
  if (g <= 0.0 || j <= 0.0)
    throw std::runtime_error("kz_constants: vanishing energy scale at the critical point");
  const double denom = dj / j - dg / g;
  if (denom <= 0.0)
    throw std::runtime_error("kz_constants: non-positive logarithmic slope at the critical point");
  return KZConstants{sc, kTwoPi * g / denom};
}

}  // namespace kz
