#include "kzchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "kzchain/rng.hpp"

namespace kz {

std::vector<std::uint8_t> kinks(const Spins& sample, double j_sign) {
  const int L = static_cast<int>(sample.size());
  const double sg = j_sign >= 0.0 ? 1.0 : -1.0;
  std::vector<std::uint8_t> k(L);
  for (int i = 0; i < L; ++i) {
    const int prod = sample[i] * sample[(i + 1) % L];
    k[i] = sg * prod > 0.0 ? 1 : 0;
  }
  return k;
}

namespace {

double sample_density(const Spins& s, double j_sign) {
  const auto k = kinks(s, j_sign);
  double n = 0.0;
  for (auto v : k) n += v;
  return n / k.size();
}

}  // namespace

double density(const SampleSet& samples, double j_sign) {
  samples.validate();
  double acc = 0.0;
  for (const auto& batch : samples.batches)
    for (const auto& s : batch) acc += sample_density(s, j_sign);
  return acc / samples.n_samples();
}

std::array<double, 3> cumulants(const SampleSet& samples, double j_sign) {
  samples.validate();
  std::vector<double> n;
  n.reserve(samples.n_samples());
  for (const auto& batch : samples.batches)
    for (const auto& s : batch) n.push_back(sample_density(s, j_sign));
  if (n.size() < 3) throw std::runtime_error("cumulants: need at least 3 samples");
  const double mean = [&] {
    double a = 0.0;
    for (double v : n) a += v;
    return a / n.size();
  }();
  double m2 = 0.0, m3 = 0.0;
  for (double v : n) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  return {mean, m2 / n.size(), m3 / n.size()};
}

std::vector<std::vector<double>> kk_correlator_batches(const SampleSet& samples, double j_sign,
                                                       int r_max) {
  samples.validate();
  const int L = samples.L;
  if (r_max <= 0) r_max = L / 2;
  r_max = std::min(r_max, L / 2);
  std::vector<std::vector<double>> out;
  out.reserve(samples.batches.size());
  for (const auto& batch : samples.batches) {
    std::vector<double> kk(r_max, 0.0);
    double nbar = 0.0;
    for (const auto& s : batch) {
      const auto k = kinks(s, j_sign);
      double n = 0.0;
      for (auto v : k) n += v;
      nbar += n / L;
      for (int r = 1; r <= r_max; ++r) {
        int acc = 0;
        for (int i = 0; i < L; ++i) acc += k[i] * k[(i + r) % L];
        kk[r - 1] += static_cast<double>(acc) / L;
      }
    }
    nbar /= batch.size();
    if (!(nbar > 0.0)) throw std::runtime_error("kk_correlator: zero kink density in a batch");
    for (int r = 1; r <= r_max; ++r) {
      const double mean_kk = kk[r - 1] / batch.size();
      kk[r - 1] = (mean_kk - nbar * nbar) / (nbar * nbar);
    }
    out.push_back(std::move(kk));
  }
  return out;
}

std::vector<double> kk_correlator(const SampleSet& samples, double j_sign, int r_max) {
  const auto per_batch = kk_correlator_batches(samples, j_sign, r_max);
  std::vector<double> mean(per_batch.front().size(), 0.0);
  for (const auto& row : per_batch)
    for (std::size_t r = 0; r < row.size(); ++r) mean[r] += row[r];
  for (auto& v : mean) v /= per_batch.size();
  return mean;
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

BootstrapResult bootstrap(int n_batches,
                          const std::function<double(const std::vector<int>&)>& statistic,
                          int n_resamples, std::uint64_t seed) {
  if (n_batches < 2) throw std::invalid_argument("bootstrap: need at least 2 batches");
  if (n_resamples < 1) throw std::invalid_argument("bootstrap: need at least 1 resample");
  std::vector<double> values(n_resamples);
  std::vector<int> idx(n_batches);
  for (int r = 0; r < n_resamples; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    for (int b = 0; b < n_batches; ++b)
      idx[b] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_batches)));
    values[r] = statistic(idx);
  }
  std::sort(values.begin(), values.end());
  return {percentile(values, 0.5), percentile(values, 0.025), percentile(values, 0.975)};
}

KinkSummary summarize_kinks(const SampleSet& samples, double j_sign, int r_max, int n_resamples,
                            std::uint64_t seed) {
  KinkSummary sum;
  sum.n_batches = samples.n_batches();
  const auto cum = cumulants(samples, j_sign);
  sum.kappa1 = cum[0];
  sum.kappa2 = cum[1];
  sum.kappa3 = cum[2];
  const auto per_batch = kk_correlator_batches(samples, j_sign, r_max);
  const int nr = static_cast<int>(per_batch.front().size());
  sum.ckk.assign(nr, 0.0);
  for (const auto& row : per_batch)
    for (int r = 0; r < nr; ++r) sum.ckk[r] += row[r];
  for (auto& v : sum.ckk) v /= per_batch.size();

  std::vector<double> batch_density(samples.n_batches());
  for (int b = 0; b < samples.n_batches(); ++b) {
    double acc = 0.0;
    for (const auto& s : samples.batches[b]) acc += sample_density(s, j_sign);
    batch_density[b] = acc / samples.batches[b].size();
  }
  if (sum.n_batches >= 2) {
    sum.density_ci = bootstrap(
        sum.n_batches,
        [&](const std::vector<int>& idx) {
          double a = 0.0;
          for (int b : idx) a += batch_density[b];
          return a / idx.size();
        },
        n_resamples, seed);
    sum.ckk_ci.resize(nr);
    for (int r = 0; r < nr; ++r)
      sum.ckk_ci[r] = bootstrap(
          sum.n_batches,
          [&](const std::vector<int>& idx) {
            double a = 0.0;
            for (int b : idx) a += per_batch[b][r];
            return a / idx.size();
          },
          n_resamples, seed + 1 + static_cast<std::uint64_t>(r));
  } else {
    sum.density_ci = {sum.kappa1, sum.kappa1, sum.kappa1};
    sum.ckk_ci.assign(nr, BootstrapResult{});
    for (int r = 0; r < nr; ++r) sum.ckk_ci[r] = {sum.ckk[r], sum.ckk[r], sum.ckk[r]};
  }
  return sum;
}

void write_summary_json(const KinkSummary& summary, const std::string& path) {
  nlohmann::json j;
  j["kappa1"] = summary.kappa1;
  j["kappa2"] = summary.kappa2;
  j["kappa3"] = summary.kappa3;
  j["n_batches"] = summary.n_batches;
  j["density_ci"] = {{"median", summary.density_ci.median},
                     {"lo", summary.density_ci.lo},
                     {"hi", summary.density_ci.hi}};
  j["ckk"] = summary.ckk;
  nlohmann::json ci = nlohmann::json::array();
  for (const auto& c : summary.ckk_ci) ci.push_back({{"median", c.median}, {"lo", c.lo}, {"hi", c.hi}});
  j["ckk_ci"] = ci;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_json: cannot open " + path);
  out << j.dump(2) << "\n";
}

void write_ckk_csv(const KinkSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ckk_csv: cannot open " + path);
  out << "r,ckk,ci_lo,ci_hi\n";
  char buf[128];
  for (std::size_t r = 0; r < summary.ckk.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", r + 1, summary.ckk[r],
                  summary.ckk_ci[r].lo, summary.ckk_ci[r].hi);
    out << buf;
  }
}

}  // namespace kz
