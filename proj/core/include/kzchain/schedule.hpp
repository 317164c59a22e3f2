#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kz {

// Unit convention used throughout: energies are ordinary frequencies in GHz
// (E/h), times in ns.  Every occurrence of E/hbar becomes 2*pi*E_GHz rad/ns.
inline constexpr double kTwoPi = 6.283185307179586476925287;

enum class ScheduleKind { Tabulated, Linear, Quadratic };

struct SchedulePoint {
  double s;          // dimensionless annealing parameter
  double gamma_ghz;  // transverse field Gamma(s)
  double jcal_ghz;   // Ising energy scale J(s)
};

struct KZConstants {
  double s_c;       // critical point, Gamma(s_c) = Jcal(s_c)*|J|
  double b_per_ns;  // quench-rate constant, 1/ns
  double tau_q(double t_a_ns) const { return b_per_ns * t_a_ns; }
};

// Annealing schedule: the pair of energy curves Gamma(s), Jcal(s).
// Analytic kinds:
//   linear     Gamma(s) = beta*(1-s),      Jcal(s) = beta*s
//   quadratic  Gamma(s) = 4*beta*(1-s)^2,  Jcal(s) = 4*beta*s^2
// Tabulated schedules interpolate piecewise-linearly and refuse to
// extrapolate outside the tabulated range.
class Schedule {
 public:
  static Schedule linear(double beta_ghz);
  static Schedule quadratic(double beta_ghz);
  static Schedule tabulated(std::vector<SchedulePoint> points);
  // CSV with header "s,gamma_ghz,jcal_ghz".
  static Schedule from_csv(const std::string& path);

  ScheduleKind kind() const { return kind_; }
  double beta() const { return beta_; }
  double s_min() const;
  double s_max() const;

  double gamma(double s) const;
  double jcal(double s) const;
  std::pair<double, double> eval(double s) const;  // (Gamma, Jcal) in GHz

  // d/ds of (Gamma, Jcal): exact for analytic kinds, central differences
  // (h = 1e-4, clamped to the tabulated range) otherwise.
  std::pair<double, double> derivatives(double s) const;

  // s_c with Gamma(s_c) = Jcal(s_c)*|J|, bisection to 1e-12 in s.
  double critical_point(double j_mag) const;

  // b = [2*pi*Gamma(s_c)] / [Jcal'(s_c)/Jcal(s_c) - Gamma'(s_c)/Gamma(s_c)],
  // in 1/ns.
  KZConstants kz_constants(double j_mag) const;

  const std::vector<SchedulePoint>& points() const { return points_; }

 private:
  Schedule(ScheduleKind kind, double beta) : kind_(kind), beta_(beta) {}
  explicit Schedule(std::vector<SchedulePoint> points);
  void check_range(double s) const;

  ScheduleKind kind_;
  double beta_ = 0.0;
  std::vector<SchedulePoint> points_;
};

}  // namespace kz
