#pragma once

#include <cstdint>
#include <string>

#include "kzchain/chain.hpp"

namespace kz {

enum class DisorderTarget { Couplings, Fields, Both };

struct DisorderSpec {
  double sigma = 0.0;  // std dev, same units as J
  DisorderTarget target = DisorderTarget::Both;
  int n_realizations = 1;
  std::uint64_t master_seed = 0;
};

// Gaussian perturbations J_i <- J + N(0,sigma), h_i <- N(0,sigma),
// deterministic in (master_seed, index).
ChainSpec realize_disorder(const ChainSpec& nominal, const DisorderSpec& spec, int index);

// Scaled-sigma rule used for couplings weaker than the reference |J| = 1.4.
inline double scaled_sigma(double sigma_ref, double j_mag) { return sigma_ref * 1.4 / j_mag; }

// CSV export: "kind,index,value" with kind in {bond, site}.
void write_chain_csv(const ChainSpec& chain, const std::string& path);

}  // namespace kz
