#include "kzchain/mode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kz {

namespace {

// One RK4 step of i dpsi/dt = H psi, dpsi/dt = -i H psi.
inline void apply_field(const TwoLevelField& f, const TwoLevel& psi, TwoLevel& out) {
  const cplx mi(0.0, -1.0);
  out[0] = mi * (f.hz * psi[0] + f.hx * psi[1]);
  out[1] = mi * (f.hx * psi[0] - f.hz * psi[1]);
}

// Instantaneous eigenbasis of H = hz*tau_z + hx*tau_x.
// Ground/excited eigenvectors for eigenvalues -e, +e with e = sqrt(hz^2+hx^2).
void eigenbasis(const TwoLevelField& f, TwoLevel& ground, TwoLevel& excited) {
  const double e = std::hypot(f.hz, f.hx);
  if (e == 0.0) throw std::runtime_error("mode_solver: degenerate two-level Hamiltonian");
  // Angle theta with hz = e*cos(th), hx = e*sin(th):
  // excited = (cos(th/2), sin(th/2)), ground = (-sin(th/2), cos(th/2)).
  const double th = std::atan2(f.hx, f.hz);
  const double c = std::cos(0.5 * th), s = std::sin(0.5 * th);
  excited = {cplx(c, 0.0), cplx(s, 0.0)};
  ground = {cplx(-s, 0.0), cplx(c, 0.0)};
}

}  // namespace

void rk4_two_level(const std::function<TwoLevelField(double)>& field, double t0, double t1,
                   int steps, TwoLevel& psi) {
  if (steps < 1) throw std::invalid_argument("rk4_two_level: steps must be >= 1");
  const double h = (t1 - t0) / steps;
  TwoLevel k1, k2, k3, k4, tmp;
  for (int n = 0; n < steps; ++n) {
    const double t = t0 + n * h;
    const TwoLevelField f0 = field(t);
    const TwoLevelField fm = field(t + 0.5 * h);
    const TwoLevelField f1 = field(t + h);
    apply_field(f0, psi, k1);
    tmp = {psi[0] + 0.5 * h * k1[0], psi[1] + 0.5 * h * k1[1]};
    apply_field(fm, tmp, k2);
    tmp = {psi[0] + 0.5 * h * k2[0], psi[1] + 0.5 * h * k2[1]};
    apply_field(fm, tmp, k3);
    tmp = {psi[0] + h * k3[0], psi[1] + h * k3[1]};
    apply_field(f1, tmp, k4);
    psi[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    psi[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  }
}

std::vector<double> modes(int L) {
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("modes: L must be even and >= 2");
  std::vector<double> ks;
  ks.reserve(L / 2);
  const double pi = 3.14159265358979323846;
  for (int m = 1; m <= L / 2; ++m) ks.push_back((2.0 * m - 1.0) * pi / L);
  return ks;
}

int recommended_mode_steps(const Schedule& schedule, double J, double t_a_ns) {
  // Fixed-step RK4 loses norm at ~ (w*h)^6/144 per step; keep the total
  // below ~1e-10 using the largest mode frequency on the schedule.
  const double jm = std::abs(J);
  const double g0 = schedule.gamma(schedule.s_min());
  const double j1 = schedule.jcal(schedule.s_max()) * jm;
  const double wmax = kTwoPi * 2.0 * (g0 + j1 + 1e-12);  // rad/ns
  const double theta = wmax * t_a_ns;
  const double y = std::pow(1.44e-8 / std::max(theta, 1.0), 0.2);
  const int n = static_cast<int>(std::ceil(theta / y));
  return std::max(4000, n);
}

double evolve_mode(const Schedule& schedule, double J, double t_a_ns, double k, int steps) {
  if (t_a_ns <= 0.0) throw std::invalid_argument("evolve_mode: t_a must be > 0");
  const double jm = std::abs(J);
  if (steps <= 0) steps = recommended_mode_steps(schedule, J, t_a_ns);
  const double ck = std::cos(k), sk = std::sin(k);
  // H_k(s) = 2*[Jcal(s)*|J|*cos k - Gamma(s)]*tau_z + 2*Jcal(s)*|J|*sin k*tau_x,
  // in GHz; the propagator carries the 2*pi angular factor and t_a (d/ds).
  auto field = [&](double s) -> TwoLevelField {
    const auto [g, jc] = schedule.eval(s);
    const double jj = jc * jm;
    return {kTwoPi * t_a_ns * 2.0 * (jj * ck - g), kTwoPi * t_a_ns * 2.0 * jj * sk};
  };
  const double s0 = schedule.s_min(), s1 = schedule.s_max();
  TwoLevel psi, excited, ground;
  eigenbasis(field(s0), ground, psi);
  psi = ground;
  rk4_two_level(field, s0, s1, steps, psi);
  const double norm2 = std::norm(psi[0]) + std::norm(psi[1]);
  if (std::abs(norm2 - 1.0) > 1e-6)
    throw std::runtime_error("evolve_mode: norm drift " + std::to_string(norm2 - 1.0) +
                             "; increase the step count");
  eigenbasis(field(s1), ground, excited);
  const cplx amp = std::conj(excited[0]) * psi[0] + std::conj(excited[1]) * psi[1];
  return std::min(1.0, std::norm(amp) / norm2);
}

ModeSpectrumResult mode_spectrum(const Schedule& schedule, double J, double t_a_ns, int L,
                                 int steps) {
  const auto ks = modes(L);
  std::vector<double> ps(ks.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = std::min<unsigned>(hw, ks.size());
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < ks.size(); ++i)
      ps[i] = evolve_mode(schedule, J, t_a_ns, ks[i], steps);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (ks.size() + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(ks.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          ps[i] = evolve_mode(schedule, J, t_a_ns, ks[i], steps);
      });
    }
    for (auto& th : pool) th.join();
  }
  ModeSpectrumResult res;
  res.L = L;
  for (std::size_t i = 0; i < ks.size(); ++i) res.p[ks[i]] = ps[i];
  return res;
}

double kink_density_modes(const Schedule& schedule, double J, double t_a_ns, int L, int steps) {
  const auto spec = mode_spectrum(schedule, J, t_a_ns, L, steps);
  double sum = 0.0;
  for (const auto& [k, p] : spec.p) sum += p;
  return 2.0 * sum / L;
}

std::array<double, 3> cumulants_from_mode_probabilities(const std::vector<double>& p, int L) {
  // Kinks occur in independent +-k pairs: N = 2*sum Bernoulli(p_k).
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (double pk : p) {
    s1 += pk;
    s2 += pk * (1.0 - pk);
    s3 += pk * (1.0 - pk) * (1.0 - 2.0 * pk);
  }
  const double Ld = static_cast<double>(L);
  return {2.0 * s1 / Ld, 4.0 * s2 / (Ld * Ld), 8.0 * s3 / (Ld * Ld * Ld)};
}

std::array<double, 3> cumulants_modes(const Schedule& schedule, double J, double t_a_ns, int L,
                                      int steps) {
  const auto spec = mode_spectrum(schedule, J, t_a_ns, L, steps);
  std::vector<double> p;
  p.reserve(spec.p.size());
  for (const auto& [k, pk] : spec.p) p.push_back(pk);
  return cumulants_from_mode_probabilities(p, L);
}

std::array<double, 2> cumulant_number_ratios(const std::array<double, 3>& c, int L) {
  if (c[0] <= 0.0) throw std::invalid_argument("cumulant_number_ratios: kappa1 must be > 0");
  const double Ld = static_cast<double>(L);
  return {Ld * c[1] / c[0], Ld * Ld * c[2] / c[0]};
}

double pgs_modes(const Schedule& schedule, double J, double t_a_ns, int L, int steps) {
  const auto spec = mode_spectrum(schedule, J, t_a_ns, L, steps);
  double pgs = 1.0;
  for (const auto& [k, p] : spec.p) pgs *= (1.0 - p);
  return pgs;
}

}  // namespace kz
