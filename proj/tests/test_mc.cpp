#include "doctest.h"

#include <cmath>
#include <map>

#include "kzchain/mc.hpp"
#include "kzchain/stats.hpp"

using namespace kz;

namespace {

double mean_magnetization(const SampleSet& set) {
  double m = 0;
  std::size_t n = 0;
  for (const auto& b : set.batches)
    for (const auto& s : b) {
      for (auto x : s) m += x;
      n += s.size();
    }
  return m / static_cast<double>(n);
}

}  // namespace

TEST_CASE("simulated annealing is deterministic in the seed") {
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(16, -1.0);
  rq.n_samples = 20;
  rq.n_batches = 2;
  rq.sweeps = 50;
  rq.seed = 5;
  auto a = run_sa(rq);
  auto b = run_sa(rq);
  CHECK(a.batches == b.batches);
  rq.seed = 6;
  auto c = run_sa(rq);
  CHECK(a.batches != c.batches);
  CHECK(a.L == 16);
  CHECK(a.n_batches() == 2);
  a.validate();
}

TEST_CASE("fixed-temperature sampling reproduces the Gibbs distribution") {
  const int L = 8;
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(L, -0.5);
  rq.n_samples = 20000;
  rq.n_batches = 1;
  rq.sweeps = 50;
  rq.fixed_beta = true;
  rq.beta = 3.0;
  rq.seed = 11;
  auto set = run_sa(rq);

  std::map<int, double> pexact;
  double Z = 0.0;
  for (int c = 0; c < (1 << L); ++c) {
    double E = 0.0;
    for (int i = 0; i < L; ++i) {
      const int si = (c >> i & 1) ? 1 : -1;
      const int sj = (c >> ((i + 1) % L) & 1) ? 1 : -1;
      E += -0.5 * si * sj;
    }
    pexact[c] = std::exp(-3.0 * E);
    Z += pexact[c];
  }
  for (auto& [c, p] : pexact) p /= Z;
  std::map<int, double> pemp;
  for (const auto& s : set.batches[0]) {
    int c = 0;
    for (int i = 0; i < L; ++i)
      if (s[i] > 0) c |= 1 << i;
    pemp[c] += 1.0 / set.batches[0].size();
  }
  double tv = 0.0;
  for (auto& [c, p] : pexact) tv += 0.5 * std::fabs(p - pemp[c]);
  CHECK(tv < 0.01);
}

TEST_CASE("longer anneals leave fewer kinks") {
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(128, -1.0);
  rq.n_samples = 200;
  rq.seed = 3;
  rq.sweeps = 64;
  const double n_fast = density(run_sa(rq), -1.0);
  rq.sweeps = 256;
  const double n_slow = density(run_sa(rq), -1.0);
  CHECK(n_slow < n_fast);
  // Diffusive coarsening: quadrupling the time roughly halves the density.
  CHECK(n_fast / n_slow == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("positive fields bias simulated annealing toward spin down") {
  // E contains +h_i s_i, so h > 0 favors s = -1.
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(16, -0.2);
  rq.chain.fields.assign(16, 0.6);
  rq.n_samples = 300;
  rq.sweeps = 60;
  rq.seed = 8;
  CHECK(mean_magnetization(run_sa(rq)) < -0.5);
}

TEST_CASE("rotor sampler determinism and readout alphabet") {
  auto sch = Schedule::linear(1.0);
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(32, -1.4);
  rq.n_samples = 30;
  rq.n_batches = 2;
  rq.sweeps = 100;
  rq.seed = 19;
  auto a = run_svmc_tf(rq, sch);
  auto b = run_svmc_tf(rq, sch);
  CHECK(a.batches == b.batches);
  a.validate();
  rq.seed = 20;
  CHECK(run_svmc_tf(rq, sch).batches != a.batches);
}

TEST_CASE("rotor sampler orders at low temperature") {
  auto sch = Schedule::linear(1.0);
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(64, -1.4);
  rq.n_samples = 50;
  rq.sweeps = 400;
  rq.beta = 32.0;
  rq.seed = 2;
  const double n = density(run_svmc_tf(rq, sch), -1.4);
  CHECK(n < 0.15);
  CHECK(n > 0.0);
}

TEST_CASE("field offsets steer the rotor sampler") {
  auto sch = Schedule::linear(1.0);
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(16, -0.2);
  rq.n_samples = 200;
  rq.sweeps = 150;
  rq.beta = 8.0;
  rq.seed = 4;
  rq.field_offsets.assign(16, 0.6);  // acts like +h: favors cos(theta) < 0
  CHECK(mean_magnetization(run_svmc_tf(rq, sch)) < -0.3);
  rq.field_offsets.assign(16, -0.6);
  CHECK(mean_magnetization(run_svmc_tf(rq, sch)) > 0.3);
}

TEST_CASE("sampler-interface wrapper matches the free function") {
  auto sch = Schedule::linear(1.0);
  SamplerRequest rq;
  rq.chain = ChainSpec::uniform(24, -1.4);
  rq.n_samples = 25;
  rq.n_batches = 1;
  rq.sweeps = 80;
  rq.seed = 33;
  auto direct = run_svmc_tf(rq, sch);

  SvmcSampler sampler(rq, sch);
  CHECK(sampler.size() == 24);
  CHECK(sampler.nominal_couplings() == rq.chain.couplings);
  auto batch = sampler.sample_batch(25, rq.seed);
  CHECK(batch.batches == direct.batches);

  // A flux term subtracts from the fields; opposite fluxes move m oppositely.
  sampler.set_flux(std::vector<double>(24, 0.8));
  auto up = sampler.sample_batch(200, 1);
  sampler.set_flux(std::vector<double>(24, -0.8));
  auto dn = sampler.sample_batch(200, 1);
  CHECK(mean_magnetization(up) > mean_magnetization(dn));
}
