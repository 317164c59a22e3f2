#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "kzchain/bdg.hpp"
#include "kzchain/disorder.hpp"
#include "kzchain/mode_solver.hpp"

using namespace kz;

TEST_CASE("quadratic-form matrices have the documented structure") {
  auto chain = ChainSpec::uniform(4, -1.0);
  chain.couplings = {-1.0, -0.8, -1.2, -0.9};
  auto sch = Schedule::linear(2.0);
  const double s = 0.3;
  Eigen::MatrixXd A, B;
  build_AB(chain, sch, s, A, B);
  REQUIRE(A.rows() == 4);
  REQUIRE(B.cols() == 4);
  const double G = sch.gamma(s), Jc = sch.jcal(s);
  CHECK(A.isApprox(A.transpose(), 1e-12));
  CHECK(B.isApprox(-B.transpose().eval(), 1e-12));
  for (int i = 0; i < 4; ++i) CHECK(A(i, i) == doctest::Approx(-2.0 * G));
  CHECK(A(0, 1) == doctest::Approx(Jc * chain.couplings[0]));
  CHECK(A(1, 2) == doctest::Approx(Jc * chain.couplings[1]));
  CHECK(B(0, 1) == doctest::Approx(Jc * chain.couplings[0]));
  CHECK(B(1, 0) == doctest::Approx(-Jc * chain.couplings[0]));
  // Anti-periodic corner.
  CHECK(A(3, 0) == doctest::Approx(-Jc * chain.couplings[3]));
  CHECK(A(0, 3) == doctest::Approx(-Jc * chain.couplings[3]));
  CHECK(B(3, 0) == doctest::Approx(-Jc * chain.couplings[3]));
  CHECK(B(0, 3) == doctest::Approx(Jc * chain.couplings[3]));
  CHECK(A(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("initial state is the transverse-field vacuum") {
  auto chain = ChainSpec::uniform(8, -1.0);
  auto sch = Schedule::linear(1.0);
  auto st = init_uv(chain, sch);
  // Jcal(0) = 0 for the linear pair: exactly u = 0, v = I.
  CHECK(st.u.norm() == doctest::Approx(0.0).scale(1e-12));
  CHECK(st.v.isApprox(Eigen::MatrixXcd::Identity(8, 8), 1e-12));
  CHECK(bdg_unitarity_error(st) < 1e-12);

  // The vacuum has no kinks relative to the ground state at s = 0: every mode
  // unexcited means nbar matches the mode solver's sudden-s=0 limit of zero
  // evolution, i.e. the correlators are those of the free vacuum.
  auto stats = kink_stats_bdg(st, chain, {1});
  CHECK(stats.nbar == doctest::Approx(0.5).epsilon(1e-9));  // x-polarized state: z bonds random
}

TEST_CASE("evolution is unitary") {
  auto chain = ChainSpec::uniform(16, -1.0);
  auto sch = Schedule::linear(1.0);
  auto st = evolve_bdg(chain, sch, 5.0);
  CHECK(bdg_unitarity_error(st) < 1e-7);
  CHECK(st.s == doctest::Approx(1.0));
  CHECK(recommended_bdg_steps(chain, sch, 5.0) > 0);
}

TEST_CASE("uniform-chain density agrees with the momentum-space solver") {
  auto sch = Schedule::linear(1.0);
  for (int L : {8, 32}) {
    auto chain = ChainSpec::uniform(L, -1.0);
    auto st = evolve_bdg(chain, sch, 5.0);
    auto stats = kink_stats_bdg(st, chain, {1});
    const double n_modes = kink_density_modes(sch, 1.0, 5.0, L);
    CHECK(stats.nbar == doctest::Approx(n_modes).epsilon(1e-8));
  }
}

TEST_CASE("clean chain against the brute-force oracle") {
  auto sch = Schedule::linear(1.0);
  auto chain = ChainSpec::uniform(8, -1.0);
  const double t_a = 5.0;
  auto st = evolve_bdg(chain, sch, t_a);
  auto stats = kink_stats_bdg(st, chain, {1, 2, 3});
  auto dense = dense_oracle(chain, sch, t_a, {1, 2, 3});
  CHECK(stats.nbar == doctest::Approx(dense.nbar).epsilon(1e-6));
  for (int r : {1, 2, 3})
    CHECK(stats.ckk.at(r) == doctest::Approx(dense.ckk.at(r)).epsilon(1e-6));
  BdgCorrelators corr(st);
  for (int i = 0; i < 8; ++i)
    CHECK(corr.two_point(i) == doctest::Approx(dense.two_point[i]).epsilon(1e-6));
}

TEST_CASE("disordered chain against the brute-force oracle") {
  auto sch = Schedule::linear(1.0);
  auto nominal = ChainSpec::uniform(8, -1.0);
  DisorderSpec spec;
  spec.sigma = 0.15;
  spec.target = DisorderTarget::Couplings;
  spec.master_seed = 31;
  auto chain = realize_disorder(nominal, spec, 0);
  const double t_a = 4.0;
  auto st = evolve_bdg(chain, sch, t_a);
  auto stats = kink_stats_bdg(st, chain, {1, 2});
  auto dense = dense_oracle(chain, sch, t_a, {1, 2});
  CHECK(stats.nbar == doctest::Approx(dense.nbar).epsilon(1e-6));
  for (int r : {1, 2}) CHECK(stats.ckk.at(r) == doctest::Approx(dense.ckk.at(r)).epsilon(1e-6));
}

TEST_CASE("mixed-sign couplings use the per-bond sign convention") {
  auto sch = Schedule::linear(1.0);
  auto ferro = ChainSpec::uniform(8, -1.0);
  ChainSpec anti = ferro;
  for (auto& j : anti.couplings) j = -j;
  anti.j_nominal = 1.0;
  const double t_a = 3.0;
  auto stats_f = kink_stats_bdg(evolve_bdg(ferro, sch, t_a), ferro, {1, 2});
  auto stats_a = kink_stats_bdg(evolve_bdg(anti, sch, t_a), anti, {1, 2});
  // Global spin-flip-on-even-sublattice symmetry: identical kink statistics.
  CHECK(stats_f.nbar == doctest::Approx(stats_a.nbar).epsilon(1e-9));
  CHECK(stats_f.ckk.at(1) == doctest::Approx(stats_a.ckk.at(1)).epsilon(1e-8));
}
