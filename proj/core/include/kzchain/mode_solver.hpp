#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "kzchain/schedule.hpp"

namespace kz {

using cplx = std::complex<double>;
using TwoLevel = std::array<cplx, 2>;

// Fixed-step RK4 for i d(psi)/dt = H(t) psi with H returned as
// {hz, hx, hy-free 2x2 real symmetric}: H = hz*tau_z + hx*tau_x, in rad/time.
// Generic on purpose; the Landau-Zener oracle drives it directly.
struct TwoLevelField {
  double hz;
  double hx;
};
void rk4_two_level(const std::function<TwoLevelField(double)>& field, double t0, double t1,
                   int steps, TwoLevel& psi);

// Anti-periodic-sector momenta k_m = (2m-1)*pi/L for m = 1..L/2
// (positive representatives of degenerate +-k pairs).
std::vector<double> modes(int L);

struct ModeSpectrumResult {
  std::map<double, double> p;  // k -> excitation probability
  int L = 0;
};

// Integrates the two-level problem for mode k across the schedule and
// returns the excitation probability in the instantaneous eigenbasis at the
// final schedule point.  steps = 0 picks a step count targeting ~1e-9 norm
// error.
double evolve_mode(const Schedule& schedule, double J, double t_a_ns, double k, int steps = 0);

ModeSpectrumResult mode_spectrum(const Schedule& schedule, double J, double t_a_ns, int L,
                                 int steps = 0);

double kink_density_modes(const Schedule& schedule, double J, double t_a_ns, int L,
                          int steps = 0);

// Cumulants of the kink density n = N/L with N = 2*sum_{k>0} Bernoulli(p_k).
std::array<double, 3> cumulants_modes(const Schedule& schedule, double J, double t_a_ns, int L,
                                      int steps = 0);

// Dimensionless ratios of the kink-number cumulants:
// (L*k2/k1, L^2*k3/k1); the asymptotic targets are 2-sqrt(2) and
// 4*(1 - 3/sqrt(2) + 2/sqrt(3)).
std::array<double, 2> cumulant_number_ratios(const std::array<double, 3>& density_cumulants,
                                             int L);

// Ground-state probability prod_{k>0} (1 - p_k); meaningful for small L.
double pgs_modes(const Schedule& schedule, double J, double t_a_ns, int L, int steps = 0);

std::array<double, 3> cumulants_from_mode_probabilities(const std::vector<double>& p, int L);

int recommended_mode_steps(const Schedule& schedule, double J, double t_a_ns);

}  // namespace kz
