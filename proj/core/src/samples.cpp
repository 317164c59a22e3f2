#include "kzchain/samples.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace kz {

std::size_t SampleSet::n_samples() const {
  std::size_t n = 0;
  for (const auto& b : batches) n += b.size();
  return n;
}

void SampleSet::validate() const {
  if (L < 2) throw std::runtime_error("SampleSet: L must be >= 2");
  if (batches.empty()) throw std::runtime_error("SampleSet: no batches");
  for (const auto& batch : batches) {
    if (batch.empty()) throw std::runtime_error("SampleSet: empty batch");
    for (const auto& s : batch) {
      if (static_cast<int>(s.size()) != L) throw std::runtime_error("SampleSet: sample length != L");
      for (auto v : s)
        if (v != 1 && v != -1) throw std::runtime_error("SampleSet: spin not in {-1,+1}");
    }
  }
}

void save_samples(const SampleSet& set, const std::string& path) {
  set.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_samples: cannot open " + path);
  out << "# kzchain samples v1\n";
  for (int b = 0; b < set.n_batches(); ++b) {
    out << "# batch " << b << "\n";
    for (const auto& s : set.batches[b]) {
      for (int i = 0; i < set.L; ++i) out << (i ? " " : "") << static_cast<int>(s[i]);
      out << "\n";
    }
  }
  nlohmann::json meta;
  meta["sampler"] = set.sampler_id;
  meta["seed"] = set.seed;
  meta["L"] = set.L;
  meta["n_batches"] = set.n_batches();
  meta["params"] = set.params;
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("save_samples: cannot open " + path + ".json");
  side << meta.dump(2) << "\n";
}

SampleSet load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_samples: cannot open " + path);
  SampleSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# batch", 0) == 0) set.batches.emplace_back();
      continue;
    }
    if (set.batches.empty()) set.batches.emplace_back();
    std::istringstream ss(line);
    Spins s;
    int v;
    while (ss >> v) s.push_back(static_cast<std::int8_t>(v));
    if (set.L == 0) set.L = static_cast<int>(s.size());
    set.batches.back().push_back(std::move(s));
  }
  std::ifstream side(path + ".json");
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side);
    set.sampler_id = meta.value("sampler", std::string{});
    set.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("params"))
      for (auto& [k, v] : meta["params"].items()) set.params[k] = v.get<double>();
  }
  set.validate();
  return set;
}

}  // namespace kz
