#include "kzchain/tebd.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kz {

namespace {

using Eigen::Matrix4cd;
using Eigen::Matrix4d;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

// (cl*2, cr) with row a*2+s  ->  (cl, 2*cr) with column s*cr+b.
MatrixXcd fold_right(const MatrixXcd& A) {
  const int cl = static_cast<int>(A.rows()) / 2;
  const int cr = static_cast<int>(A.cols());
  MatrixXcd R(cl, 2 * cr);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < cl; ++a) R.row(a).segment(s * cr, cr) = A.row(a * 2 + s);
  return R;
}

// Inverse of fold_right: (r, 2*c) -> (r*2, c).
MatrixXcd unfold(const MatrixXcd& M) {
  const int r = static_cast<int>(M.rows());
  const int c = static_cast<int>(M.cols()) / 2;
  MatrixXcd A(r * 2, c);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < r; ++a) A.row(a * 2 + s) = M.row(a).segment(s * c, c);
  return A;
}

// Physical slice: B(a, b) = A(a*2 + s, b).
MatrixXcd phys_block(const MatrixXcd& A, int s) {
  const int cl = static_cast<int>(A.rows()) / 2;
  MatrixXcd B(cl, A.cols());
  for (int a = 0; a < cl; ++a) B.row(a) = A.row(a * 2 + s);
  return B;
}

struct SplitResult {
  MatrixXcd left;   // isometry, columns = kept rank
  VectorXd sv;      // kept singular values, renormalized to unit 2-norm
  MatrixXcd right;  // isometry (V), columns = kept rank
  double entropy = 0.0;
  double discarded = 0.0;
};

// Thin SVD through the Gram matrix of the smaller side: a Hermitian
// eigendecomposition at these block sizes is several times faster than
// Eigen's direct SVD, and singular vectors below the truncation cutoff
// never survive, so the sqrt precision loss near machine epsilon is
// confined to discarded directions.
SplitResult svd_truncate(const MatrixXcd& M, int D, double threshold) {
  const bool tall = M.rows() > M.cols();
  const int n = static_cast<int>(tall ? M.cols() : M.rows());
  MatrixXcd gram = tall ? MatrixXcd(M.adjoint() * M) : MatrixXcd(M * M.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) throw std::runtime_error("tebd: SVD failed to converge");
  VectorXd sv(n);  // eigenvalues come out ascending; singular values descending
  for (int i = 0; i < n; ++i) sv(i) = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1 - i)));
  const double total = sv.squaredNorm();
  if (!(total > 0.0)) throw std::runtime_error("tebd: zero-norm block in SVD");
  const double cutoff = threshold * sv(0);
  int chi = 1;
  while (chi < sv.size() && chi < D && sv(chi) > cutoff) ++chi;
  SplitResult out;
  const double kept = sv.head(chi).squaredNorm();
  out.discarded = (total - kept) / total;
  MatrixXcd vecs(n, chi);
  for (int i = 0; i < chi; ++i) vecs.col(i) = es.eigenvectors().col(n - 1 - i);
  if (tall) {
    out.right = vecs;
    out.left = M * vecs * sv.head(chi).cwiseInverse().asDiagonal();
  } else {
    out.left = vecs;
    out.right = M.adjoint() * vecs * sv.head(chi).cwiseInverse().asDiagonal();
  }
  out.sv = sv.head(chi) / std::sqrt(kept);
  for (int i = 0; i < chi; ++i) {
    const double p = out.sv(i) * out.sv(i);
    if (p > 0.0) out.entropy -= p * std::log(p);
  }
  return out;
}

// Two-site gate on linear sites (p, p+1); U acts on the pair basis s1*2+s2.
// move_right leaves the orthogonality center on p+1, otherwise on p.
void apply_two_site(MpsState& mps, int p, const Matrix4cd& U, const TebdConfig& cfg,
                    bool move_right) {
  const MatrixXcd& A1 = mps.tensors[p];
  const MatrixXcd& A2 = mps.tensors[p + 1];
  const int cl = static_cast<int>(A1.rows()) / 2;
  const int cr = static_cast<int>(A2.cols());
  MatrixXcd theta = A1 * fold_right(A2);  // (cl*2, 2*cr); row a*2+s1, col s2*cr+b
  Eigen::Vector4cd x, y;
  for (int a = 0; a < cl; ++a)
    for (int b = 0; b < cr; ++b) {
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) x(s1 * 2 + s2) = theta(a * 2 + s1, s2 * cr + b);
      y = U * x;
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) theta(a * 2 + s1, s2 * cr + b) = y(s1 * 2 + s2);
    }
  SplitResult sp = svd_truncate(theta, cfg.D, cfg.svd_threshold);
  mps.discarded_weight += sp.discarded;
  mps.bond_entropy[p] = sp.entropy;
  if (move_right) {
    mps.tensors[p] = sp.left;
    mps.tensors[p + 1] = unfold(sp.sv.asDiagonal() * sp.right.adjoint());
  } else {
    mps.tensors[p] = sp.left * sp.sv.asDiagonal();
    mps.tensors[p + 1] = unfold(sp.right.adjoint());
  }
}

// Next-nearest-neighbor gate on linear sites (p, p+2); U acts on the outer
// pair (s1, s3), identity on the middle site.
void apply_three_site(MpsState& mps, int p, const Matrix4cd& U, const TebdConfig& cfg,
                      bool move_right) {
  const int cl = static_cast<int>(mps.tensors[p].rows()) / 2;
  const int c3 = static_cast<int>(mps.tensors[p + 2].cols());
  // theta: rows a*4 + s1*2 + s2 (cl*4), cols s3*c3 + b.
  MatrixXcd theta =
      unfold(mps.tensors[p] * fold_right(mps.tensors[p + 1])) * fold_right(mps.tensors[p + 2]);
  Eigen::Vector4cd x, y;
  for (int a = 0; a < cl; ++a)
    for (int s2 = 0; s2 < 2; ++s2)
      for (int b = 0; b < c3; ++b) {
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s3 = 0; s3 < 2; ++s3) x(s1 * 2 + s3) = theta(a * 4 + s1 * 2 + s2, s3 * c3 + b);
        y = U * x;
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s3 = 0; s3 < 2; ++s3) theta(a * 4 + s1 * 2 + s2, s3 * c3 + b) = y(s1 * 2 + s3);
      }
  if (move_right) {
    // Split (a s1 | s2 s3 b) then (chi1 s2 | s3 b); center ends on p+2.
    SplitResult sp1 = svd_truncate(fold_right(theta), cfg.D, cfg.svd_threshold);
    mps.discarded_weight += sp1.discarded;
    mps.bond_entropy[p] = sp1.entropy;
    mps.tensors[p] = sp1.left;
    MatrixXcd rest = unfold(sp1.sv.asDiagonal() * sp1.right.adjoint());  // (chi1*2, 2*c3)
    SplitResult sp2 = svd_truncate(rest, cfg.D, cfg.svd_threshold);
    mps.discarded_weight += sp2.discarded;
    mps.bond_entropy[p + 1] = sp2.entropy;
    mps.tensors[p + 1] = sp2.left;
    mps.tensors[p + 2] = unfold(sp2.sv.asDiagonal() * sp2.right.adjoint());
  } else {
    // Split (a s1 s2 | s3 b) then (a s1 | s2 chi2); center ends on p.
    SplitResult sp1 = svd_truncate(theta, cfg.D, cfg.svd_threshold);
    mps.discarded_weight += sp1.discarded;
    mps.bond_entropy[p + 1] = sp1.entropy;
    mps.tensors[p + 2] = unfold(sp1.right.adjoint());
    MatrixXcd rest = fold_right(sp1.left * sp1.sv.asDiagonal());  // (cl*2, 2*chi2)
    SplitResult sp2 = svd_truncate(rest, cfg.D, cfg.svd_threshold);
    mps.discarded_weight += sp2.discarded;
    mps.bond_entropy[p] = sp2.entropy;
    mps.tensors[p] = sp2.left * sp2.sv.asDiagonal();
    mps.tensors[p + 1] = unfold(sp2.right.adjoint());
  }
}

// exp(-i * 2*pi * Hg * tau_ns) for a real symmetric 4x4 gate Hamiltonian in GHz.
Matrix4cd gate_exponential(const Matrix4d& hg, double tau_ns) {
  Eigen::SelfAdjointEigenSolver<Matrix4d> es(hg);
  Matrix4cd U = Matrix4cd::Zero();
  for (int m = 0; m < 4; ++m) {
    const double phase = -kTwoPi * es.eigenvalues()(m) * tau_ns;
    const Eigen::Vector4d v = es.eigenvectors().col(m);
    U += std::polar(1.0, phase) * (v * v.transpose()).cast<std::complex<double>>();
  }
  return U;
}

// Gate Hamiltonian of ring bond rb in the ordered (left linear site, right
// linear site) basis, with the site fields split half-and-half across the two
// gates touching each site.
Matrix4d gate_hamiltonian(const ChainSpec& chain, const LinearMapping& mapping, int rb,
                          double gamma, double jcal) {
  const int L = chain.L;
  const int sa = rb, sb = (rb + 1) % L;
  const double ha = chain.fields.empty() ? 0.0 : chain.fields[sa];
  const double hb = chain.fields.empty() ? 0.0 : chain.fields[sb];
  const bool a_left = mapping.lin_of_ring[sa] < mapping.lin_of_ring[sb];
  const double h_left = 0.5 * (a_left ? ha : hb);
  const double h_right = 0.5 * (a_left ? hb : ha);
  static const Eigen::Matrix2d X = (Eigen::Matrix2d() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2d Z = (Eigen::Matrix2d() << 1, 0, 0, -1).finished();
  static const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  auto kron = [](const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
    Matrix4d K;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) K.block<2, 2>(2 * i, 2 * j) = A(i, j) * B;
    return K;
  };
  Matrix4d hg = -0.5 * gamma * (kron(X, I) + kron(I, X));
  hg += jcal * chain.couplings[rb] * kron(Z, Z);
  hg += jcal * (h_left * kron(Z, I) + h_right * kron(I, Z));
  return hg;
}

}  // namespace

int MpsState::max_bond_dim() const {
  int d = 1;
  for (const auto& t : tensors) d = std::max(d, static_cast<int>(t.cols()));
  return d;
}

double MpsState::norm() const {
  MatrixXcd F = MatrixXcd::Ones(1, 1);
  for (const auto& A : tensors) {
    const MatrixXcd B0 = phys_block(A, 0), B1 = phys_block(A, 1);
    F = (B0.transpose() * F * B0.conjugate() + B1.transpose() * F * B1.conjugate()).eval();
  }
  return std::sqrt(std::abs(F(0, 0).real()));
}

MpsState MpsState::plus_product(int L) {
  MpsState mps;
  mps.tensors.assign(L, (MatrixXcd(2, 1) << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)).finished());
  mps.bond_entropy.assign(L - 1, 0.0);
  return mps;
}

LinearMapping map_periodic_to_linear(int L) {
  if (L < 4 || L % 2 != 0)
    throw std::invalid_argument("map_periodic_to_linear: L must be even and >= 4");
  LinearMapping map;
  map.lin_of_ring.resize(L);
  for (int j = 0; j < L; ++j) {
    if (j == 0)
      map.lin_of_ring[j] = 0;
    else if (j <= L / 2)
      map.lin_of_ring[j] = 2 * j - 1;
    else
      map.lin_of_ring[j] = 2 * (L - j);
  }
  map.bonds.resize(L);
  for (int rb = 0; rb < L; ++rb) {
    int p = map.lin_of_ring[rb], q = map.lin_of_ring[(rb + 1) % L];
    if (p > q) std::swap(p, q);
    if (q - p != 1 && q - p != 2)
      throw std::logic_error("map_periodic_to_linear: bond is neither nearest nor next-nearest");
    map.bonds[rb] = {p, q};
  }
  // Right sweep in linear order, squared center gate at the right edge, then
  // the mirrored left sweep.
  std::vector<int> order(L);
  for (int rb = 0; rb < L; ++rb) order[rb] = rb;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return map.bonds[a] < map.bonds[b]; });
  if (map.bonds[order[L - 1]] != std::make_pair(L - 2, L - 1))
    throw std::logic_error("map_periodic_to_linear: center gate is not the right edge bond");
  map.sweep.reserve(2 * L - 1);
  map.full_dt.reserve(2 * L - 1);
  for (int m = 0; m < L - 1; ++m) {
    map.sweep.push_back(order[m]);
    map.full_dt.push_back(false);
  }
  map.sweep.push_back(order[L - 1]);
  map.full_dt.push_back(true);
  for (int m = L - 2; m >= 0; --m) {
    map.sweep.push_back(order[m]);
    map.full_dt.push_back(false);
  }
  return map;
}

void trotter_slice(MpsState& mps, const ChainSpec& chain, const Schedule& schedule, double s,
                   const TebdConfig& config, const LinearMapping& mapping) {
  if (config.D < 2 || config.dt_ns <= 0.0)
    throw std::invalid_argument("trotter_slice: require D >= 2 and dt > 0");
  const int L = chain.L;
  if (mps.size() != L) throw std::invalid_argument("trotter_slice: MPS size mismatch");
  const auto [gamma, jcal] = schedule.eval(s);
  std::vector<Matrix4cd> half(L);
  for (int rb = 0; rb < L; ++rb)
    half[rb] = gate_exponential(gate_hamiltonian(chain, mapping, rb, gamma, jcal),
                                0.5 * config.dt_ns);
  const int n = static_cast<int>(mapping.sweep.size());
  for (int m = 0; m < n; ++m) {
    const int rb = mapping.sweep[m];
    const auto [p, q] = mapping.bonds[rb];
    const bool move_right = m < L - 1;
    const Matrix4cd U =
        mapping.full_dt[m]
            ? gate_exponential(gate_hamiltonian(chain, mapping, rb, gamma, jcal), config.dt_ns)
            : half[rb];
    if (q == p + 1)
      apply_two_site(mps, p, U, config, move_right);
    else
      apply_three_site(mps, p, U, config, move_right);
  }
}

namespace {

// Left-canonicalize in place by a QR sweep; returns the dropped global norm.
void left_canonicalize(MpsState& mps) {
  const int L = mps.size();
  for (int i = 0; i + 1 < L; ++i) {
    MatrixXcd& A = mps.tensors[i];
    const int rows = static_cast<int>(A.rows()), cols = static_cast<int>(A.cols());
    const int k = std::min(rows, cols);
    Eigen::HouseholderQR<MatrixXcd> qr(A);
    MatrixXcd Q = qr.householderQ() * MatrixXcd::Identity(rows, k);
    MatrixXcd R = qr.matrixQR().topLeftCorner(k, cols).triangularView<Eigen::Upper>();
    A = Q;
    mps.tensors[i + 1] = unfold(R * fold_right(mps.tensors[i + 1]));
  }
  const double nrm = mps.tensors[L - 1].norm();
  if (!(nrm > 0.0)) throw std::runtime_error("tebd: zero-norm state");
  mps.tensors[L - 1] /= nrm;
}

std::vector<MatrixXcd> right_environments(const MpsState& mps) {
  const int L = mps.size();
  std::vector<MatrixXcd> env(L + 1);
  env[L] = MatrixXcd::Ones(1, 1);
  for (int p = L - 1; p >= 0; --p) {
    const MatrixXcd B0 = phys_block(mps.tensors[p], 0), B1 = phys_block(mps.tensors[p], 1);
    env[p] = B0 * env[p + 1] * B0.adjoint() + B1 * env[p + 1] * B1.adjoint();
  }
  return env;
}

// <prod_{p in zpos} sigma^z_p> on a left-canonical MPS; zpos holds sorted
// linear positions.
double zz_expectation(const MpsState& mps, const std::vector<MatrixXcd>& renv,
                      const std::vector<int>& zpos) {
  if (zpos.empty()) return 1.0;
  const int p0 = zpos.front(), p1 = zpos.back();
  std::size_t next = 0;
  MatrixXcd F = MatrixXcd::Identity(mps.tensors[p0].rows() / 2, mps.tensors[p0].rows() / 2);
  for (int p = p0; p <= p1; ++p) {
    const bool z_here = next < zpos.size() && zpos[next] == p;
    if (z_here) ++next;
    const MatrixXcd B0 = phys_block(mps.tensors[p], 0), B1 = phys_block(mps.tensors[p], 1);
    const double z0 = 1.0, z1 = z_here ? -1.0 : 1.0;
    F = (z0 * B0.transpose() * F * B0.conjugate() + z1 * B1.transpose() * F * B1.conjugate())
            .eval();
  }
  return (F.cwiseProduct(renv[p1 + 1])).sum().real();
}

}  // namespace

TebdObservables measure_kinks(MpsState& mps, const ChainSpec& chain, const LinearMapping& mapping,
                              int r_max) {
  const int L = chain.L;
  left_canonicalize(mps);
  const auto renv = right_environments(mps);
  TebdObservables obs;
  obs.discarded_weight = mps.discarded_weight;
  obs.bond_entropy = mps.bond_entropy;
  std::vector<double> sgn(L);
  obs.two_point.resize(L);
  for (int i = 0; i < L; ++i) {
    const double j = chain.couplings[i] != 0.0 ? chain.couplings[i] : chain.j_nominal;
    sgn[i] = j >= 0.0 ? 1.0 : -1.0;
    std::vector<int> pos = {mapping.lin_of_ring[i], mapping.lin_of_ring[(i + 1) % L]};
    std::sort(pos.begin(), pos.end());
    obs.two_point[i] = zz_expectation(mps, renv, pos);
  }
  double acc = 0.0;
  for (int i = 0; i < L; ++i) acc += 0.5 * (1.0 + sgn[i] * obs.two_point[i]);
  obs.nbar = acc / L;
  if (r_max <= 0) r_max = L / 2;
  r_max = std::min(r_max, L / 2);
  if (!(obs.nbar > 0.0)) return obs;  // correlator undefined on a kink-free state
  for (int r = 1; r <= r_max; ++r) {
    double chi = 0.0;
    for (int i = 0; i < L; ++i) {
      const int j = (i + r) % L;
      // Z sites of K_i K_j: the symmetric difference of the two bond pairs.
      std::vector<int> ring = {i, (i + 1) % L, j, (j + 1) % L};
      std::sort(ring.begin(), ring.end());
      std::vector<int> pos;
      for (std::size_t m = 0; m < ring.size();) {
        std::size_t e = m;
        while (e < ring.size() && ring[e] == ring[m]) ++e;
        if ((e - m) % 2 == 1) pos.push_back(mapping.lin_of_ring[ring[m]]);
        m = e;
      }
      std::sort(pos.begin(), pos.end());
      const double four = zz_expectation(mps, renv, pos);
      chi += 0.25 * (1.0 + sgn[i] * obs.two_point[i] + sgn[j] * obs.two_point[j] +
                     sgn[i] * sgn[j] * four);
    }
    chi /= L;
    obs.ckk[r] = (chi - obs.nbar * obs.nbar) / (obs.nbar * obs.nbar);
  }
  return obs;
}

std::pair<MpsState, TebdObservables> run_tebd(const ChainSpec& chain, const Schedule& schedule,
                                              double t_a_ns, const TebdConfig& config) {
  chain.validate();
  if (t_a_ns <= 0.0) throw std::invalid_argument("run_tebd: t_a must be > 0");
  const auto mapping = map_periodic_to_linear(chain.L);
  MpsState mps = MpsState::plus_product(chain.L);
  const int slices = std::max(1, static_cast<int>(std::ceil(t_a_ns / config.dt_ns - 1e-9)));
  const double s0 = schedule.s_min(), s1 = schedule.s_max();
  for (int l = 0; l < slices; ++l) {
    // Midpoint evaluation keeps the slice second order in dt.
    const double s = s0 + (s1 - s0) * ((l + 0.5) / slices);
    trotter_slice(mps, chain, schedule, s, config, mapping);
  }
  TebdObservables obs = measure_kinks(mps, chain, mapping, config.r_max);
  return {std::move(mps), std::move(obs)};
}

}  // namespace kz
