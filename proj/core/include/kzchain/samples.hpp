#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kz {

using Spins = std::vector<std::int8_t>;  // entries in {-1, +1}

// Batched +-1 samples; one batch corresponds to one annealer call and is the
// resampling unit of the bootstrap.
struct SampleSet {
  int L = 0;
  std::vector<std::vector<Spins>> batches;
  std::string sampler_id;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;

  int n_batches() const { return static_cast<int>(batches.size()); }
  std::size_t n_samples() const;
  void validate() const;  // throws on empty batches or out-of-alphabet spins
};

// Text format: one sample per line (space-separated +-1), batches separated
// by "# batch <k>" marker lines; metadata goes to <path>.json.
void save_samples(const SampleSet& set, const std::string& path);
SampleSet load_samples(const std::string& path);

}  // namespace kz
