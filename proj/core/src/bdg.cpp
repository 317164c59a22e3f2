#include "kzchain/bdg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kz {

namespace {

// y = (A x) with the tridiagonal-plus-corners stencil, J in GHz.
void apply_A(const Eigen::VectorXd& J, double gamma, const Eigen::MatrixXcd& x,
             Eigen::MatrixXcd& y) {
  const int L = static_cast<int>(x.rows());
  y.noalias() = (-2.0 * gamma) * x;
  y.topRows(L - 1).noalias() += J.head(L - 1).asDiagonal() * x.bottomRows(L - 1);
  y.bottomRows(L - 1).noalias() += J.head(L - 1).asDiagonal() * x.topRows(L - 1);
  y.row(0).noalias() += (-J[L - 1]) * x.row(L - 1);
  y.row(L - 1).noalias() += (-J[L - 1]) * x.row(0);
}

// y = (B x), antisymmetric part of the stencil.
void apply_B(const Eigen::VectorXd& J, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
  const int L = static_cast<int>(x.rows());
  y.setZero();
  y.topRows(L - 1).noalias() += J.head(L - 1).asDiagonal() * x.bottomRows(L - 1);
  y.bottomRows(L - 1).noalias() -= J.head(L - 1).asDiagonal() * x.topRows(L - 1);
  y.row(0).noalias() += J[L - 1] * x.row(L - 1);
  y.row(L - 1).noalias() += (-J[L - 1]) * x.row(0);
}

struct Deriv {
  Eigen::MatrixXcd au, bv, av, bu;
  Eigen::VectorXd J;

  void resize(int L) {
    au.resize(L, L);
    bv.resize(L, L);
    av.resize(L, L);
    bu.resize(L, L);
    J.resize(L);
  }

  // du = -i*c*(A u + B v), dv = +i*c*(A v + B u), c = 2*pi*t_a.
  void eval(const ChainSpec& chain, const Schedule& schedule, double s, double c,
            const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v, Eigen::MatrixXcd& du,
            Eigen::MatrixXcd& dv) {
    const auto [gamma, jc] = schedule.eval(s);
    for (int i = 0; i < chain.L; ++i) J[i] = jc * chain.couplings[i];
    apply_A(J, gamma, u, au);
    apply_B(J, v, bv);
    apply_A(J, gamma, v, av);
    apply_B(J, u, bu);
    const std::complex<double> mi(0.0, -1.0), pi_(0.0, 1.0);
    du.noalias() = (mi * c) * (au + bv);
    dv.noalias() = (pi_ * c) * (av + bu);
  }
};

}  // namespace

void build_AB(const ChainSpec& chain, const Schedule& schedule, double s, Eigen::MatrixXd& A,
              Eigen::MatrixXd& B) {
  chain.validate();
  const int L = chain.L;
  const auto [gamma, jc] = schedule.eval(s);
  A.setZero(L, L);
  B.setZero(L, L);
  for (int i = 0; i < L; ++i) A(i, i) = -2.0 * gamma;
  for (int i = 0; i < L - 1; ++i) {
    const double Ji = jc * chain.couplings[i];
    A(i, i + 1) = Ji;
    A(i + 1, i) = Ji;
    B(i, i + 1) = Ji;
    B(i + 1, i) = -Ji;
  }
  const double JL = jc * chain.couplings[L - 1];
  A(L - 1, 0) = -JL;
  A(0, L - 1) = -JL;
  B(L - 1, 0) = -JL;
  B(0, L - 1) = JL;
}

BdGState init_uv(const ChainSpec& chain, const Schedule& schedule) {
  chain.validate();
  if (chain.has_fields())
    throw std::invalid_argument("bdg: longitudinal fields are not representable; use tebd");
  const int L = chain.L;
  const double s0 = schedule.s_min();
  BdGState state;
  state.s = s0;
  double jmax = 0.0;
  for (double j : chain.couplings) jmax = std::max(jmax, std::abs(j));
  if (schedule.jcal(s0) * jmax == 0.0) {
    // Vacuum branch: the transverse-field ground state is annihilated with
    // u = 0, v = I under the convention used by the correlator formulas below
    // (validated against the brute-force oracle).
    state.u = Eigen::MatrixXcd::Zero(L, L);
    state.v = Eigen::MatrixXcd::Identity(L, L);
    return state;
  }
  Eigen::MatrixXd A, B;
  build_AB(chain, schedule, s0, A, B);
  const Eigen::MatrixXd C = A + B;
  const Eigen::MatrixXd K = C * C.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  if (es.info() != Eigen::Success) throw std::runtime_error("bdg: initial diagonalization failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd Q = es.eigenvectors();
  const double scale = std::sqrt(std::max(lam.maxCoeff(), 0.0));
  Eigen::MatrixXd P(L, L);
  for (int m = 0; m < L; ++m) {
    const double eps = std::sqrt(std::max(lam[m], 0.0));
    if (eps <= 1e-9 * scale)
      throw std::runtime_error("bdg: degenerate zero mode at s=0; schedule must start in the paramagnetic phase");
    P.col(m) = -(C.transpose() * Q.col(m)) / eps;
  }
  // Branch with u -> 0, v -> I in the Jcal -> 0 limit, matching the vacuum
  // branch above.
  state.u = 0.5 * (P - Q);
  state.v = 0.5 * (P + Q);
  return state;
}

double bdg_unitarity_error(const BdGState& state) {
  const int L = static_cast<int>(state.u.rows());
  const Eigen::MatrixXcd M = state.u.adjoint() * state.u + state.v.adjoint() * state.v -
                             Eigen::MatrixXcd::Identity(L, L);
  return M.cwiseAbs().maxCoeff();
}

int recommended_bdg_steps(const ChainSpec& chain, const Schedule& schedule, double t_a_ns) {
  double jmax = 0.0;
  for (double j : chain.couplings) jmax = std::max(jmax, std::abs(j));
  const double g0 = schedule.gamma(schedule.s_min());
  const double j1 = schedule.jcal(schedule.s_max()) * jmax;
  const double theta = kTwoPi * 2.0 * (g0 + j1 + 1e-12) * t_a_ns;
  const double y = std::pow(1.44e-8 / std::max(theta, 1.0), 0.2);
  const int base = static_cast<int>(2000.0 * std::max(1.0, t_a_ns / 10.0));
  return std::max(base, static_cast<int>(std::ceil(theta / y)));
}

BdGState evolve_bdg(const ChainSpec& chain, const Schedule& schedule, double t_a_ns, int steps) {
  if (t_a_ns <= 0.0) throw std::invalid_argument("evolve_bdg: t_a must be > 0");
  if (steps <= 0) steps = recommended_bdg_steps(chain, schedule, t_a_ns);
  BdGState state = init_uv(chain, schedule);
  const int L = chain.L;
  const double s0 = schedule.s_min(), s1 = schedule.s_max();
  const double h = (s1 - s0) / steps;
  const double c = kTwoPi * t_a_ns;

  Deriv d;
  d.resize(L);
  Eigen::MatrixXcd k1u(L, L), k1v(L, L), k2u(L, L), k2v(L, L), k3u(L, L), k3v(L, L), k4u(L, L),
      k4v(L, L), tu(L, L), tv(L, L);
  const int check_every = std::max(1, steps / 16);
  for (int n = 0; n < steps; ++n) {
    const double s = s0 + n * h;
    d.eval(chain, schedule, s, c, state.u, state.v, k1u, k1v);
    tu = state.u + 0.5 * h * k1u;
    tv = state.v + 0.5 * h * k1v;
    d.eval(chain, schedule, s + 0.5 * h, c, tu, tv, k2u, k2v);
    tu = state.u + 0.5 * h * k2u;
    tv = state.v + 0.5 * h * k2v;
    d.eval(chain, schedule, s + 0.5 * h, c, tu, tv, k3u, k3v);
    tu = state.u + h * k3u;
    tv = state.v + h * k3v;
    d.eval(chain, schedule, s + h, c, tu, tv, k4u, k4v);
    state.u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    state.v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if ((n + 1) % check_every == 0 || n + 1 == steps) {
      const double err = bdg_unitarity_error(state);
      if (err > 1e-5)
        throw std::runtime_error("evolve_bdg: unitarity drift " + std::to_string(err) +
                                 " at s=" + std::to_string(s + h) + " with " +
                                 std::to_string(steps) + " steps; increase the step count");
    }
  }
  state.s = s1;
  return state;
}

BdgCorrelators::BdgCorrelators(const BdGState& state) : L_(static_cast<int>(state.u.rows())) {
  const Eigen::MatrixXcd P = state.p();
  const Eigen::MatrixXcd Q = state.q();
  qp_.noalias() = Q * P.adjoint();
  qq_.noalias() = Q * Q.adjoint();
  pp_.noalias() = P * P.adjoint();
}

double BdgCorrelators::two_point(int i) const {
  const int ip = (i + 1) % L_;
  return eta(i) * qp_(i, ip).real();
}

std::vector<double> BdgCorrelators::two_point_all() const {
  std::vector<double> out(L_);
  for (int i = 0; i < L_; ++i) out[i] = two_point(i);
  return out;
}

double BdgCorrelators::four_point(int i, int r) const {
  const int a = i % L_;
  const int b = (i + 1) % L_;
  const int c = (i + r) % L_;
  const int d = (i + r + 1) % L_;
  const std::complex<double> val = -qp_(a, d) * std::conj(qp_(c, b))  // [PQ^dag]_{b c} = conj([QP^dag]_{c b})
                                   + qq_(a, c) * pp_(b, d) + qp_(a, b) * qp_(c, d);
  return eta(a) * eta(c) * val.real();
}

KinkStats kink_stats_bdg(const BdGState& state, const ChainSpec& chain,
                         const std::vector<int>& r_values) {
  const int L = chain.L;
  BdgCorrelators corr(state);
  std::vector<double> sgn(L), tp(L);
  for (int i = 0; i < L; ++i) {
    const double j = chain.couplings[i] != 0.0 ? chain.couplings[i] : chain.j_nominal;
    sgn[i] = j >= 0.0 ? 1.0 : -1.0;
    tp[i] = corr.two_point(i);
  }
  KinkStats out;
  double acc = 0.0;
  for (int i = 0; i < L; ++i) acc += 0.5 * (1.0 + sgn[i] * tp[i]);
  out.nbar = acc / L;
  if (out.nbar <= 0.0)
    throw std::runtime_error("kink_stats_bdg: zero kink density; correlator undefined");
  std::vector<int> rs = r_values;
  if (rs.empty())
    for (int r = 1; r <= L / 2; ++r) rs.push_back(r);
  for (int r : rs) {
    double chi = 0.0;
    for (int i = 0; i < L; ++i) {
      const int ir = (i + r) % L;
      const double fp = corr.four_point(i, r);
      chi += 0.25 * (1.0 + sgn[i] * tp[i] + sgn[ir] * tp[ir] + sgn[i] * sgn[ir] * fp);
    }
    chi /= L;
    out.ckk[r] = (chi - out.nbar * out.nbar) / (out.nbar * out.nbar);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense 2^L oracle.

namespace {

using Vec = Eigen::VectorXcd;

struct DenseModel {
  int L;
  std::size_t dim;
  Eigen::VectorXd diag;  // sum_i J_i z_i z_{i+1} + sum_i h_i z_i (dimensionless)

  explicit DenseModel(const ChainSpec& chain) : L(chain.L), dim(std::size_t{1} << chain.L) {
    diag.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t x = 0; x < dim; ++x) {
      double e = 0.0;
      for (int i = 0; i < L; ++i) {
        const double zi = (x >> i) & 1 ? -1.0 : 1.0;
        const double zj = (x >> ((i + 1) % L)) & 1 ? -1.0 : 1.0;
        e += chain.couplings[i] * zi * zj;
        e += chain.fields[i] * zi;
      }
      diag[static_cast<Eigen::Index>(x)] = e;
    }
  }

  // y = H(s) x with H = -Gamma*sum sigma^x + Jcal*diag (GHz).
  void apply(double gamma, double jc, const Vec& x, Vec& y) const {
    y.array() = jc * diag.array() * x.array();
    for (int i = 0; i < L; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      for (std::size_t a = 0; a < dim; ++a)
        y[static_cast<Eigen::Index>(a)] -= gamma * x[static_cast<Eigen::Index>(a ^ bit)];
    }
  }
};

// Lanczos with full reorthogonalization for the lowest eigenpair of a real
// symmetric operator acting on real vectors.
Eigen::VectorXd lanczos_ground(const DenseModel& model, double gamma, double jc, int iters,
                               std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(model.dim);
  iters = std::min<int>(iters, static_cast<int>(n));
  std::vector<Eigen::VectorXd> basis;
  Eigen::VectorXd q(n);
  {
    // deterministic start vector
    for (Eigen::Index i = 0; i < n; ++i)
      q[i] = 2.0 * (static_cast<double>((seed + 0x9E3779B97F4A7C15ULL * (i + 1)) >> 11) *
                    0x1.0p-53) -
             1.0;
    q.normalize();
  }
  Eigen::VectorXd alpha(iters), beta(iters);
  Vec xc(n), yc(n);
  Eigen::VectorXd w(n);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(iters, iters);
  int m = 0;
  for (; m < iters; ++m) {
    basis.push_back(q);
    xc = q.cast<std::complex<double>>();
    model.apply(gamma, jc, xc, yc);
    w = yc.real();
    alpha[m] = q.dot(w);
    w -= alpha[m] * q;
    if (m > 0) w -= beta[m - 1] * basis[m - 1];
    for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
    const double nb = w.norm();
    T(m, m) = alpha[m];
    if (m + 1 < iters) {
      if (nb < 1e-12) {
        ++m;
        break;
      }
      beta[m] = nb;
      T(m, m + 1) = nb;
      T(m + 1, m) = nb;
      q = w / nb;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
  const Eigen::VectorXd y = es.eigenvectors().col(0);
  Eigen::VectorXd ground = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < m; ++j) ground += y[j] * basis[j];
  ground.normalize();
  return ground;
}

}  // namespace

DenseOracleResult dense_oracle(const ChainSpec& chain, const Schedule& schedule, double t_a_ns,
                               const std::vector<int>& r_values, int steps) {
  chain.validate();
  if (chain.L > 12) throw std::invalid_argument("dense_oracle: refusing L > 12");
  if (t_a_ns <= 0.0) throw std::invalid_argument("dense_oracle: t_a must be > 0");
  const DenseModel model(chain);
  const int L = chain.L;
  const std::size_t dim = model.dim;
  const double s0 = schedule.s_min(), s1 = schedule.s_max();

  double jmax = 0.0;
  for (double j : chain.couplings) jmax = std::max(jmax, std::abs(j));
  for (double hh : chain.fields) jmax = std::max(jmax, std::abs(hh));
  if (steps <= 0) {
    const double theta =
        kTwoPi * L * (schedule.gamma(s0) + 2.0 * schedule.jcal(s1) * jmax + 1e-12) * t_a_ns;
    const double y = std::pow(1.44e-8 / std::max(theta, 1.0), 0.2);
    steps = std::max(4000, static_cast<int>(std::ceil(theta / y)));
  }

  Vec psi(static_cast<Eigen::Index>(dim));
  if (schedule.jcal(s0) * jmax == 0.0) {
    psi.setConstant(std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  } else {
    psi = lanczos_ground(model, schedule.gamma(s0), schedule.jcal(s0), 200, 0x5eedULL)
              .cast<std::complex<double>>();
  }

  const double c = kTwoPi * t_a_ns;
  const double h = (s1 - s0) / steps;
  Vec k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()), tmp(psi.size());
  const std::complex<double> mi(0.0, -1.0);
  auto deriv = [&](double s, const Vec& x, Vec& out) {
    const auto [g, jc] = schedule.eval(s);
    model.apply(g, jc, x, out);
    out *= mi * c;
  };
  for (int n = 0; n < steps; ++n) {
    const double s = s0 + n * h;
    deriv(s, psi, k1);
    tmp = psi + 0.5 * h * k1;
    deriv(s + 0.5 * h, tmp, k2);
    tmp = psi + 0.5 * h * k2;
    deriv(s + 0.5 * h, tmp, k3);
    tmp = psi + h * k3;
    deriv(s + h, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  psi /= std::sqrt(psi.squaredNorm());

  // Diagonal observables.
  std::vector<double> sgn(L);
  for (int i = 0; i < L; ++i) {
    const double j = chain.couplings[i] != 0.0 ? chain.couplings[i] : chain.j_nominal;
    sgn[i] = j >= 0.0 ? 1.0 : -1.0;
  }
  DenseOracleResult out;
  out.two_point.assign(L, 0.0);
  std::vector<int> rs = r_values;
  if (rs.empty())
    for (int r = 1; r <= L / 2; ++r) rs.push_back(r);
  std::map<int, double> chi;
  for (int r : rs) chi[r] = 0.0;
  std::vector<double> kink(L);
  for (std::size_t x = 0; x < dim; ++x) {
    const double w = std::norm(psi[static_cast<Eigen::Index>(x)]);
    if (w == 0.0) continue;
    double nk = 0.0;
    for (int i = 0; i < L; ++i) {
      const double zi = (x >> i) & 1 ? -1.0 : 1.0;
      const double zj = (x >> ((i + 1) % L)) & 1 ? -1.0 : 1.0;
      out.two_point[i] += w * zi * zj;
      kink[i] = 0.5 * (1.0 + sgn[i] * zi * zj);
      nk += kink[i];
    }
    out.nbar += w * nk / L;
    for (auto& [r, acc] : chi) {
      double v = 0.0;
      for (int i = 0; i < L; ++i) v += kink[i] * kink[(i + r) % L];
      acc += w * v / L;
    }
  }
  if (out.nbar > 0.0)
    for (auto& [r, acc] : chi) out.ckk[r] = (acc - out.nbar * out.nbar) / (out.nbar * out.nbar);

  // Ground-state probability at the final schedule point.
  const double gf = schedule.gamma(s1);
  const double jcf = schedule.jcal(s1);
  if (gf == 0.0) {
    // Classical endpoint: project onto the set of minimal-energy basis states.
    double emin = model.diag.minCoeff();
    double p = 0.0;
    for (std::size_t x = 0; x < dim; ++x)
      if (model.diag[static_cast<Eigen::Index>(x)] <= emin + 1e-12 * std::abs(emin))
        p += std::norm(psi[static_cast<Eigen::Index>(x)]);
    out.pgs = p;
  } else {
    const Eigen::VectorXd gs = lanczos_ground(model, gf, jcf, 300, 0x5eedULL);
    const std::complex<double> ov = gs.cast<std::complex<double>>().dot(psi);
    out.pgs = std::norm(ov);
  }
  return out;
}

}  // namespace kz
