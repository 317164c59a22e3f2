#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kzchain/disorder.hpp"

using kz::ChainSpec;
using kz::DisorderSpec;
using kz::DisorderTarget;

TEST_CASE("zero sigma is the identity") {
  auto nominal = ChainSpec::uniform(16, -1.4);
  DisorderSpec spec;
  spec.sigma = 0.0;
  spec.master_seed = 11;
  auto chain = kz::realize_disorder(nominal, spec, 0);
  for (int i = 0; i < 16; ++i) {
    CHECK(chain.couplings[i] == doctest::Approx(-1.4));
    CHECK(chain.fields[i] == 0.0);
  }
}

TEST_CASE("realizations are deterministic in (seed, index)") {
  auto nominal = ChainSpec::uniform(32, -1.0);
  DisorderSpec spec;
  spec.sigma = 0.1;
  spec.n_realizations = 8;
  spec.master_seed = 77;
  auto a = kz::realize_disorder(nominal, spec, 3);
  auto b = kz::realize_disorder(nominal, spec, 3);
  CHECK(a.couplings == b.couplings);
  CHECK(a.fields == b.fields);

  auto c = kz::realize_disorder(nominal, spec, 4);
  CHECK(a.couplings != c.couplings);

  spec.master_seed = 78;
  auto d = kz::realize_disorder(nominal, spec, 3);
  CHECK(a.couplings != d.couplings);
}

TEST_CASE("target selects which arrays are perturbed") {
  auto nominal = ChainSpec::uniform(64, -1.0);
  DisorderSpec spec;
  spec.sigma = 0.2;
  spec.master_seed = 5;

  spec.target = DisorderTarget::Couplings;
  auto jc = kz::realize_disorder(nominal, spec, 0);
  CHECK(jc.couplings != nominal.couplings);
  CHECK(jc.fields == nominal.fields);

  spec.target = DisorderTarget::Fields;
  auto hc = kz::realize_disorder(nominal, spec, 0);
  CHECK(hc.couplings == nominal.couplings);
  CHECK(hc.fields != nominal.fields);

  spec.target = DisorderTarget::Both;
  auto bc = kz::realize_disorder(nominal, spec, 0);
  CHECK(bc.couplings != nominal.couplings);
  CHECK(bc.fields != nominal.fields);
}

TEST_CASE("perturbation statistics match the requested sigma") {
  auto nominal = ChainSpec::uniform(512, -1.0);
  DisorderSpec spec;
  spec.sigma = 0.05;
  spec.target = DisorderTarget::Both;
  spec.n_realizations = 20;
  spec.master_seed = 99;
  double mean_j = 0.0, var_j = 0.0, mean_h = 0.0, var_h = 0.0;
  const int n_real = 20;
  const int n = 512 * n_real;
  for (int r = 0; r < n_real; ++r) {
    auto chain = kz::realize_disorder(nominal, spec, r);
    for (int i = 0; i < 512; ++i) {
      const double dj = chain.couplings[i] - (-1.0);
      mean_j += dj;
      var_j += dj * dj;
      mean_h += chain.fields[i];
      var_h += chain.fields[i] * chain.fields[i];
    }
  }
  mean_j /= n;
  var_j = var_j / n - mean_j * mean_j;
  mean_h /= n;
  var_h = var_h / n - mean_h * mean_h;
  CHECK(std::fabs(mean_j) < 0.002);
  CHECK(std::sqrt(var_j) == doctest::Approx(0.05).epsilon(0.03));
  CHECK(std::fabs(mean_h) < 0.002);
  CHECK(std::sqrt(var_h) == doctest::Approx(0.05).epsilon(0.03));
}

TEST_CASE("scaled sigma rule") {
  CHECK(kz::scaled_sigma(0.05, 1.4) == doctest::Approx(0.05));
  CHECK(kz::scaled_sigma(0.05, 0.7) == doctest::Approx(0.10));
}

TEST_CASE("chain CSV export") {
  namespace fs = std::filesystem;
  auto chain = ChainSpec::uniform(4, -1.0);
  chain.fields = {0.1, 0.0, -0.2, 0.0};
  const auto path = fs::temp_directory_path() / "kzchain_chain_test.csv";
  kz::write_chain_csv(chain, path.string());
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,index,value");
  int bonds = 0, sites = 0, rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("bond,", 0) == 0) ++bonds;
    if (line.rfind("site,", 0) == 0) ++sites;
  }
  CHECK(rows == 8);
  CHECK(bonds == 4);
  CHECK(sites == 4);
  fs::remove(path);
}
