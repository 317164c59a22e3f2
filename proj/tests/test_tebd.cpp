#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "kzchain/bdg.hpp"
#include "kzchain/disorder.hpp"
#include "kzchain/tebd.hpp"

using namespace kz;

TEST_CASE("ring-to-line mapping, L = 4 by hand") {
  auto m = map_periodic_to_linear(4);
  CHECK(m.lin_of_ring == std::vector<int>{0, 1, 3, 2});
  std::set<std::pair<int, int>> bonds(m.bonds.begin(), m.bonds.end());
  std::set<std::pair<int, int>> expected{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  CHECK(bonds == expected);
  CHECK(m.sweep.size() == 2u * 4u - 1u);
}

TEST_CASE("ring-to-line mapping, general structure") {
  for (int L : {6, 8, 16}) {
    auto m = map_periodic_to_linear(L);
    // Bijection onto 0..L-1.
    std::set<int> image(m.lin_of_ring.begin(), m.lin_of_ring.end());
    CHECK(static_cast<int>(image.size()) == L);
    // Every mapped bond is nearest or next-nearest neighbor on the line.
    int nn = 0;
    for (auto [a, b] : m.bonds) {
      CHECK(a < b);
      CHECK(b - a <= 2);
      if (b - a == 1) ++nn;
    }
    CHECK(nn == 2);  // exactly the two seams
    // The center full-dt gate sits at the far edge.
    int n_full = 0;
    for (std::size_t g = 0; g < m.sweep.size(); ++g)
      if (m.full_dt[g]) {
        ++n_full;
        CHECK(m.bonds[m.sweep[g]] == std::make_pair(L - 2, L - 1));
      }
    CHECK(n_full == 1);
    CHECK(m.sweep.size() == 2u * static_cast<std::size_t>(L) - 1u);
  }
}

TEST_CASE("product state basics") {
  auto mps = MpsState::plus_product(8);
  CHECK(mps.size() == 8);
  CHECK(mps.max_bond_dim() == 1);
  CHECK(mps.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pure Ising point leaves kink observables invariant") {
  // At s = 1 the linear schedule has Gamma = 0; the x-polarized state only
  // acquires phases, so z-basis kink observables stay at their free values.
  auto chain = ChainSpec::uniform(8, -1.0);
  auto sch = Schedule::linear(1.0);
  auto mapping = map_periodic_to_linear(8);
  auto mps = MpsState::plus_product(8);
  TebdConfig cfg;
  cfg.D = 16;
  for (int l = 0; l < 20; ++l) trotter_slice(mps, chain, sch, 1.0, cfg, mapping);
  auto obs = measure_kinks(mps, chain, mapping, 2);
  CHECK(obs.nbar == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(mps.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("untruncated evolution matches the brute-force oracle") {
  auto chain = ChainSpec::uniform(8, -1.0);
  auto sch = Schedule::linear(1.0);
  TebdConfig cfg;
  cfg.D = 16;  // full rank for L = 8
  cfg.dt_ns = 0.005;
  cfg.r_max = 3;
  auto [mps, obs] = run_tebd(chain, sch, 2.0, cfg);
  auto dense = dense_oracle(chain, sch, 2.0, {1, 2, 3});
  CHECK(obs.nbar == doctest::Approx(dense.nbar).epsilon(2e-4));
  for (int r : {1, 2, 3}) CHECK(obs.ckk.at(r) == doctest::Approx(dense.ckk.at(r)).epsilon(2e-3));
  CHECK(obs.discarded_weight < 1e-10);
  // Ring translation invariance survives the linear mapping up to the
  // Trotter error (the gate ordering singles out the seams).
  for (int i = 1; i < 8; ++i)
    CHECK(obs.two_point[i] == doctest::Approx(obs.two_point[0]).epsilon(1e-4));
}

TEST_CASE("disordered couplings and fields against the brute-force oracle") {
  auto nominal = ChainSpec::uniform(8, -1.0);
  DisorderSpec spec;
  spec.sigma = 0.2;
  spec.target = DisorderTarget::Both;
  spec.master_seed = 17;
  auto chain = realize_disorder(nominal, spec, 0);
  auto sch = Schedule::linear(1.0);
  TebdConfig cfg;
  cfg.D = 16;
  cfg.dt_ns = 0.005;
  auto [mps, obs] = run_tebd(chain, sch, 2.0, cfg);
  auto dense = dense_oracle(chain, sch, 2.0, {});
  CHECK(obs.nbar == doctest::Approx(dense.nbar).epsilon(2e-4));
  for (int i = 0; i < 8; ++i)
    CHECK(obs.two_point[i] == doctest::Approx(dense.two_point[i]).epsilon(2e-3));
}

TEST_CASE("Trotter error shrinks quadratically") {
  auto chain = ChainSpec::uniform(8, -1.0);
  auto sch = Schedule::linear(1.0);
  auto run = [&](double dt) {
    TebdConfig cfg;
    cfg.D = 16;
    cfg.dt_ns = dt;
    return run_tebd(chain, sch, 2.0, cfg).second.nbar;
  };
  auto dense = dense_oracle(chain, sch, 2.0, {});
  const double e1 = std::fabs(run(0.02) - dense.nbar);
  const double e2 = std::fabs(run(0.01) - dense.nbar);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.5));
}

TEST_CASE("truncation bookkeeping: entropy bound and discarded weight") {
  auto chain = ChainSpec::uniform(32, -1.4);
  auto sch = Schedule::linear(1.0);
  TebdConfig cfg;
  cfg.D = 8;
  cfg.dt_ns = 0.02;
  auto [mps, obs] = run_tebd(chain, sch, 4.0, cfg);
  CHECK(mps.max_bond_dim() <= 8);
  for (double S : obs.bond_entropy) {
    CHECK(S >= -1e-12);
    CHECK(S <= 2.0 * std::log(8.0) + 1e-9);
  }
  CHECK(obs.discarded_weight >= 0.0);
  CHECK(mps.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("odd or tiny sizes are rejected") {
  CHECK_THROWS(map_periodic_to_linear(5));
  CHECK_THROWS(map_periodic_to_linear(2));
}
