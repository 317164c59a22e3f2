#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "kzchain/samples.hpp"

namespace kz {

// Per-bond defect indicators K_i = [1 + sign(J) s_i s_{i+1}]/2 with periodic
// wrap; j_sign < 0 for ferromagnetic coupling.
std::vector<std::uint8_t> kinks(const Spins& sample, double j_sign);

// Mean kink density over all samples.
double density(const SampleSet& samples, double j_sign);

// Central-moment cumulants (k1, k2, k3) of the per-sample kink density.
std::array<double, 3> cumulants(const SampleSet& samples, double j_sign);

// Normalized kink-kink correlator C_r = (1/L) sum_i (<K_i K_{i+r}> - n^2)/n^2
// for r = 1..r_max (default L/2), estimated per batch with the batch's own
// density in the denominator, then averaged over batches.
std::vector<double> kk_correlator(const SampleSet& samples, double j_sign, int r_max = 0);

// Per-batch correlator estimates (rows: batches), the bootstrap input.
std::vector<std::vector<double>> kk_correlator_batches(const SampleSet& samples, double j_sign,
                                                       int r_max = 0);

struct BootstrapResult {
  double median = 0.0;
  double lo = 0.0;  // 2.5th percentile of the resampled statistic
  double hi = 0.0;  // 97.5th percentile
};

// Resamples batch indices 0..n_batches-1 with replacement; the statistic maps
// a resampled index list to a scalar.  Deterministic in the seed.
BootstrapResult bootstrap(int n_batches,
                          const std::function<double(const std::vector<int>&)>& statistic,
                          int n_resamples, std::uint64_t seed);

struct KinkSummary {
  double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;
  std::vector<double> ckk;  // index r-1
  BootstrapResult density_ci;
  std::vector<BootstrapResult> ckk_ci;
  int n_batches = 0;
};

KinkSummary summarize_kinks(const SampleSet& samples, double j_sign, int r_max = 0,
                            int n_resamples = 1000, std::uint64_t seed = 0);

void write_summary_json(const KinkSummary& summary, const std::string& path);
void write_ckk_csv(const KinkSummary& summary, const std::string& path);

}  // namespace kz
