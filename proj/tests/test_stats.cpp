#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "kzchain/rng.hpp"
#include "kzchain/samples.hpp"
#include "kzchain/stats.hpp"

using namespace kz;

namespace {

SampleSet make_set(int L, std::vector<std::vector<Spins>> batches) {
  SampleSet s;
  s.L = L;
  s.batches = std::move(batches);
  s.sampler_id = "test";
  return s;
}

}  // namespace

TEST_CASE("kink indicators by hand") {
  // Ferromagnetic ring (sign J < 0): kinks sit on the two domain walls.
  Spins s{+1, +1, -1, -1};
  auto k = kinks(s, -1.0);
  CHECK(k == std::vector<std::uint8_t>{0, 1, 0, 1});
  // Antiferromagnetic reading of the same state.
  auto ka = kinks(s, +1.0);
  CHECK(ka == std::vector<std::uint8_t>{1, 0, 1, 0});
}

TEST_CASE("density and correlator on a hand-worked example") {
  auto set = make_set(4, {{Spins{+1, +1, -1, -1}}});
  CHECK(density(set, -1.0) == doctest::Approx(0.5));
  // K = (0,1,0,1): <K_i K_{i+1}> = 0 -> C_1 = -1; <K_i K_{i+2}> = 1/2 -> C_2 = +1.
  auto c = kk_correlator(set, -1.0, 2);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == doctest::Approx(-1.0));
  CHECK(c[1] == doctest::Approx(+1.0));
}

TEST_CASE("correlator is symmetric under r -> L - r and clamped to L/2") {
  const int L = 12;
  CounterRng rng(8, 0);
  std::vector<Spins> batch;
  for (int n = 0; n < 200; ++n) {
    Spins s(L);
    for (auto& x : s) x = rng.next_double() < 0.5 ? -1 : 1;
    batch.push_back(s);
  }
  auto set = make_set(L, {batch});
  // Requests beyond L/2 are clamped; the ring estimator is r <-> L-r symmetric.
  auto c = kk_correlator(set, -1.0, L - 1);
  REQUIRE(c.size() == static_cast<std::size_t>(L / 2));

  // Hand estimator for arbitrary r, same normalization.
  auto hand = [&](int r) {
    double nbar = 0.0, kk = 0.0;
    for (const auto& s : batch) {
      auto k = kinks(s, -1.0);
      double n = 0.0;
      int acc = 0;
      for (int i = 0; i < L; ++i) {
        n += k[i];
        acc += k[i] * k[(i + r) % L];
      }
      nbar += n / L;
      kk += static_cast<double>(acc) / L;
    }
    nbar /= batch.size();
    kk /= batch.size();
    return (kk - nbar * nbar) / (nbar * nbar);
  };
  for (int r = 1; r <= L / 2; ++r) {
    CHECK(c[r - 1] == doctest::Approx(hand(r)).epsilon(1e-12));
    CHECK(hand(r) == doctest::Approx(hand(L - r)).epsilon(1e-12));
  }
}

TEST_CASE("per-batch estimates use each batch's own density") {
  auto set = make_set(4, {{Spins{+1, +1, -1, -1}}, {Spins{+1, -1, +1, -1}}});
  auto rows = kk_correlator_batches(set, -1.0, 2);
  REQUIRE(rows.size() == 2);
  // Second batch is fully kinked: K = (1,1,1,1), n = 1 -> C_r = 0.
  CHECK(rows[1][0] == doctest::Approx(0.0));
  CHECK(rows[1][1] == doctest::Approx(0.0));
  CHECK(rows[0][0] == doctest::Approx(-1.0));
  // The batch mean averages the per-batch rows.
  auto mean = kk_correlator(set, -1.0, 2);
  CHECK(mean[0] == doctest::Approx(-0.5));
  CHECK(mean[1] == doctest::Approx(0.5));
}

TEST_CASE("a batch with no kinks cannot be normalized") {
  auto set = make_set(4, {{Spins{+1, +1, +1, +1}}});
  CHECK_THROWS(kk_correlator(set, -1.0, 2));
}

TEST_CASE("cumulants of the per-sample density") {
  // Densities 0.25, 0.5, 0.75 with equal weight: mean 0.5, variance 1/24,
  // third central moment 0.
  auto set = make_set(4, {{Spins{+1, -1, -1, -1},    // one domain pair -> n = 0.5? no:
                           Spins{+1, +1, -1, -1},    // n = 0.5
                           Spins{+1, -1, +1, -1}}}); // n = 1
  // Recompute directly instead of guessing: use the library's own density per
  // sample via kinks().
  double d0 = 0.0;
  std::vector<double> dens;
  for (const auto& s : set.batches[0]) {
    auto k = kinks(s, -1.0);
    double n = 0;
    for (auto v : k) n += v;
    dens.push_back(n / 4.0);
    d0 += n / 4.0 / 3.0;
  }
  auto c = cumulants(set, -1.0);
  double m2 = 0, m3 = 0;
  for (double n : dens) {
    m2 += (n - d0) * (n - d0) / 3.0;
    m3 += (n - d0) * (n - d0) * (n - d0) / 3.0;
  }
  CHECK(c[0] == doctest::Approx(d0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(m2).epsilon(1e-12));
  CHECK(c[2] == doctest::Approx(m3).scale(1e-12));
  // Too few samples for a third cumulant.
  auto tiny = make_set(4, {{Spins{+1, +1, -1, -1}}});
  CHECK_THROWS(cumulants(tiny, -1.0));
}

TEST_CASE("bootstrap is deterministic and brackets the mean") {
  std::vector<double> values{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
  auto stat = [&](const std::vector<int>& idx) {
    double m = 0;
    for (int i : idx) m += values[i];
    return m / idx.size();
  };
  auto r1 = bootstrap(8, stat, 500, 42);
  auto r2 = bootstrap(8, stat, 500, 42);
  CHECK(r1.median == r2.median);
  CHECK(r1.lo == r2.lo);
  CHECK(r1.hi == r2.hi);
  CHECK(r1.lo < r1.median);
  CHECK(r1.median < r1.hi);
  CHECK(r1.median == doctest::Approx(4.5).epsilon(0.15));
  CHECK(r1.lo > 1.0);
  CHECK(r1.hi < 8.0);
  auto r3 = bootstrap(8, stat, 500, 43);
  CHECK(r3.median != r1.median);
}

TEST_CASE("constant statistic collapses the interval") {
  auto stat = [](const std::vector<int>&) { return 3.25; };
  auto r = bootstrap(5, stat, 100, 0);
  CHECK(r.median == doctest::Approx(3.25));
  CHECK(r.lo == doctest::Approx(3.25));
  CHECK(r.hi == doctest::Approx(3.25));
}

TEST_CASE("summary assembles densities, cumulants and intervals") {
  CounterRng rng(21, 0);
  std::vector<std::vector<Spins>> batches;
  for (int b = 0; b < 8; ++b) {
    std::vector<Spins> batch;
    for (int n = 0; n < 50; ++n) {
      Spins s(16);
      for (auto& x : s) x = rng.next_double() < 0.5 ? -1 : 1;
      batch.push_back(s);
    }
    batches.push_back(batch);
  }
  auto set = make_set(16, batches);
  auto sum = summarize_kinks(set, -1.0, 4, 400, 9);
  CHECK(sum.kappa1 == doctest::Approx(0.5).epsilon(0.05));
  CHECK(sum.n_batches == 8);
  REQUIRE(sum.ckk.size() == 4);
  REQUIRE(sum.ckk_ci.size() == 4);
  CHECK(sum.density_ci.lo <= sum.density_ci.median);
  CHECK(sum.density_ci.median <= sum.density_ci.hi);
  CHECK(sum.density_ci.median == doctest::Approx(0.5).epsilon(0.05));
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(sum.ckk_ci[r].lo <= sum.ckk[r] + 0.05);
    CHECK(sum.ckk_ci[r].hi >= sum.ckk[r] - 0.05);
  }

  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  const auto jpath = (dir / "kzchain_summary_test.json").string();
  const auto cpath = (dir / "kzchain_ckk_test.csv").string();
  write_summary_json(sum, jpath);
  write_ckk_csv(sum, cpath);
  std::ifstream jin(jpath);
  REQUIRE(jin.good());
  auto j = nlohmann::json::parse(jin);
  CHECK(j.at("kappa1").get<double>() == doctest::Approx(sum.kappa1));
  std::ifstream cin_(cpath);
  std::string header;
  std::getline(cin_, header);
  CHECK(header.find("r") != std::string::npos);
  fs::remove(jpath);
  fs::remove(cpath);
}

TEST_CASE("sample sets round-trip through the text format") {
  auto set = make_set(6, {{Spins{+1, -1, +1, -1, +1, -1}, Spins{+1, +1, +1, -1, -1, -1}},
                          {Spins{-1, -1, -1, -1, -1, +1}}});
  set.seed = 77;
  set.params["sweeps"] = 100.0;
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "kzchain_samples_test.txt").string();
  save_samples(set, path);
  auto back = load_samples(path);
  CHECK(back.L == 6);
  REQUIRE(back.n_batches() == 2);
  CHECK(back.batches == set.batches);
  CHECK(back.seed == 77);
  CHECK(back.params.at("sweeps") == doctest::Approx(100.0));
  fs::remove(path);
  fs::remove(path + ".json");
}
