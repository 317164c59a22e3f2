#include "kzchain/experiment.hpp"

#include <chrono>
#include "json.hpp"
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "kzchain/bdg.hpp"
#include "kzchain/disorder.hpp"
#include "kzchain/mc.hpp"
#include "kzchain/mode_solver.hpp"
#include "kzchain/parallel.hpp"
#include "kzchain/stats.hpp"
#include "kzchain/tebd.hpp"
#include "kzchain/theory.hpp"

namespace kz {

const char* const kToolVersion = "0.1.0";

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void reject_unknown(const json& j, const std::string& scope,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::runtime_error("config: " + scope + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw std::runtime_error("config: unknown key '" + key + "' in " + scope);
  }
}

std::vector<double> as_number_list(const json& j, const std::string& what) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else {
    throw std::runtime_error("config: " + what + " must be a number or array");
  }
  if (out.empty()) throw std::runtime_error("config: " + what + " is empty");
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j, "config",
                 {"version", "method", "schedule", "chain", "t_a", "disorder", "tebd", "mc",
                  "stats", "shim", "seed", "out_dir", "theory_overlay"});
  ExperimentConfig c;
  c.raw_text = j.dump(2);
  c.version = j.value("version", 1);
  if (c.version != 1) throw std::runtime_error("config: unsupported version");
  if (!j.contains("method")) throw std::runtime_error("config: method is required");
  c.method = j.at("method").get<std::string>();

  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    reject_unknown(s, "schedule", {"kind", "beta_ghz", "csv"});
    c.schedule_kind = s.value("kind", std::string("linear"));
    c.schedule_beta = s.value("beta_ghz", 1.0);
    c.schedule_csv = s.value("csv", std::string{});
  }
  if (!j.contains("chain")) throw std::runtime_error("config: chain is required");
  {
    const auto& ch = j.at("chain");
    reject_unknown(ch, "chain", {"L", "j"});
    for (double L : as_number_list(ch.at("L"), "chain.L"))
      c.L_values.push_back(static_cast<int>(L));
    c.j_nominal = ch.at("j").get<double>();
  }
  if (!j.contains("t_a")) throw std::runtime_error("config: t_a is required");
  c.t_a_values = as_number_list(j.at("t_a"), "t_a");
  if (j.contains("disorder")) {
    const auto& d = j.at("disorder");
    reject_unknown(d, "disorder", {"sigma", "target", "n_realizations", "scale_by_j"});
    c.sigma = d.value("sigma", 0.0);
    c.disorder_target = d.value("target", std::string("couplings"));
    c.n_realizations = d.value("n_realizations", 1);
    c.sigma_scale_by_j = d.value("scale_by_j", false);
  }
  if (j.contains("tebd")) {
    const auto& t = j.at("tebd");
    reject_unknown(t, "tebd", {"D", "dt_ns"});
    c.tebd_D = t.value("D", 32);
    c.tebd_dt = t.value("dt_ns", 0.01);
  }
  if (j.contains("mc")) {
    const auto& m = j.at("mc");
    reject_unknown(m, "mc", {"n_samples", "n_batches", "beta", "fixed_beta"});
    c.mc_samples = m.value("n_samples", 100);
    c.mc_batches = m.value("n_batches", 10);
    c.mc_beta = m.value("beta", 32.0);
    c.mc_fixed_beta = m.value("fixed_beta", false);
  }
  if (j.contains("stats")) {
    const auto& s = j.at("stats");
    reject_unknown(s, "stats", {"r_max", "n_resamples"});
    c.r_max = s.value("r_max", 0);
    c.n_resamples = s.value("n_resamples", 1000);
  }
  if (j.contains("shim")) {
    const auto& s = j.at("shim");
    reject_unknown(s, "shim",
                   {"iterations", "alpha_flux", "alpha_j", "alpha_offset", "delta_j",
                    "delta_offset", "n_lines", "kappa", "offset_clamp", "coupling_clamp",
                    "batch_size"});
    c.shim_iterations = s.value("iterations", 300);
    c.shim.alpha_flux = s.value("alpha_flux", c.shim.alpha_flux);
    c.shim.alpha_j = s.value("alpha_j", c.shim.alpha_j);
    c.shim.alpha_offset = s.value("alpha_offset", c.shim.alpha_offset);
    c.shim.delta_j = s.value("delta_j", c.shim.delta_j);
    c.shim.delta_offset = s.value("delta_offset", c.shim.delta_offset);
    c.shim.n_lines = s.value("n_lines", c.shim.n_lines);
    c.shim.kappa = s.value("kappa", c.shim.kappa);
    c.shim.offset_clamp = s.value("offset_clamp", c.shim.offset_clamp);
    c.shim.coupling_clamp = s.value("coupling_clamp", c.shim.coupling_clamp);
    c.shim.batch_size = s.value("batch_size", c.shim.batch_size);
  }
  c.seed = j.value("seed", std::uint64_t{0});
  c.out_dir = j.value("out_dir", std::string("out"));
  c.theory_overlay = j.value("theory_overlay", true);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: JSON parse error: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> methods = {"modes", "bdg",  "tebd", "sa",
                                                   "svmc",  "shim", "dense-oracle"};
  bool ok = false;
  for (const auto& m : methods) ok = ok || m == method;
  if (!ok) throw std::runtime_error("config: unknown method '" + method + "'");
  if (L_values.empty()) throw std::runtime_error("config: chain.L is empty");
  for (int L : L_values)
    if (L < 2 || L % 2 != 0) throw std::runtime_error("config: L must be even and >= 2");
  for (double t : t_a_values)
    if (t <= 0.0) throw std::runtime_error("config: t_a entries must be > 0");
  if (sigma < 0.0) throw std::runtime_error("config: sigma must be >= 0");
  if (n_realizations < 1) throw std::runtime_error("config: n_realizations must be >= 1");
  if (schedule_kind != "linear" && schedule_kind != "quadratic" && schedule_kind != "tabulated")
    throw std::runtime_error("config: unknown schedule kind '" + schedule_kind + "'");
  if (schedule_kind == "tabulated" && schedule_csv.empty())
    throw std::runtime_error("config: tabulated schedule requires a csv path");
  if (disorder_target != "couplings" && disorder_target != "fields" && disorder_target != "both")
    throw std::runtime_error("config: unknown disorder target '" + disorder_target + "'");
}

Schedule ExperimentConfig::make_schedule() const {
  if (schedule_kind == "linear") return Schedule::linear(schedule_beta);
  if (schedule_kind == "quadratic") return Schedule::quadratic(schedule_beta);
  return Schedule::from_csv(schedule_csv);
}

namespace {

DisorderTarget parse_target(const std::string& t) {
  if (t == "couplings") return DisorderTarget::Couplings;
  if (t == "fields") return DisorderTarget::Fields;
  return DisorderTarget::Both;
}

struct GridPoint {
  int index;
  int L;
  double t_a;
  int realization;
};

struct PointResult {
  std::map<std::string, double> values;            // results.csv columns
  std::vector<std::pair<int, double>> ckk;         // (r, value)
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path), columns_(columns) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
    out_ << "\n";
  }
  void row(const std::map<std::string, double>& values) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out_ << ",";
      auto it = values.find(columns_[i]);
      if (it != values.end()) out_ << fmt17(it->second);
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::vector<std::string> columns_;
};

PointResult run_point(const ExperimentConfig& cfg, const Schedule& schedule,
                      const GridPoint& gp) {
  PointResult res;
  ChainSpec chain = ChainSpec::uniform(gp.L, cfg.j_nominal);
  double sigma_eff = cfg.sigma;
  if (cfg.sigma_scale_by_j && cfg.j_nominal != 0.0)
    sigma_eff = scaled_sigma(cfg.sigma, std::abs(cfg.j_nominal));
  if (sigma_eff > 0.0) {
    DisorderSpec dspec{sigma_eff, parse_target(cfg.disorder_target), cfg.n_realizations,
                       cfg.seed};
    chain = realize_disorder(chain, dspec, gp.realization);
  }
  const double j_sign = cfg.j_nominal >= 0.0 ? 1.0 : -1.0;
  std::vector<int> r_list;
  for (int r = 1; r <= cfg.r_max; ++r) r_list.push_back(r);

  if (cfg.method == "modes") {
    const auto cum = cumulants_modes(schedule, cfg.j_nominal, gp.t_a, gp.L);
    res.values["nbar"] = cum[0];
    res.values["kappa2"] = cum[1];
    res.values["kappa3"] = cum[2];
    res.values["pgs"] = pgs_modes(schedule, cfg.j_nominal, gp.t_a, gp.L);
  } else if (cfg.method == "bdg") {
    const BdGState state = evolve_bdg(chain, schedule, gp.t_a);
    const KinkStats ks = kink_stats_bdg(state, chain, r_list);
    res.values["nbar"] = ks.nbar;
    for (const auto& [r, v] : ks.ckk) res.ckk.emplace_back(r, v);
  } else if (cfg.method == "tebd") {
    TebdConfig tcfg;
    tcfg.D = cfg.tebd_D;
    tcfg.dt_ns = cfg.tebd_dt;
    tcfg.r_max = cfg.r_max > 0 ? cfg.r_max : 1;
    auto [mps, obs] = run_tebd(chain, schedule, gp.t_a, tcfg);
    res.values["nbar"] = obs.nbar;
    res.values["discarded_weight"] = obs.discarded_weight;
    double smax = 0.0;
    for (double s : obs.bond_entropy) smax = std::max(smax, s);
    res.values["max_entropy"] = smax;
    for (const auto& [r, v] : obs.ckk) res.ckk.emplace_back(r, v);
  } else if (cfg.method == "dense-oracle") {
    const DenseOracleResult d = dense_oracle(chain, schedule, gp.t_a, r_list);
    res.values["nbar"] = d.nbar;
    res.values["pgs"] = d.pgs;
    for (const auto& [r, v] : d.ckk) res.ckk.emplace_back(r, v);
  } else if (cfg.method == "sa" || cfg.method == "svmc") {
    SamplerRequest req;
    req.chain = chain;
    req.n_samples = cfg.mc_samples;
    req.n_batches = cfg.mc_batches;
    req.sweeps = std::max(1, static_cast<int>(std::lround(gp.t_a)));
    req.beta = cfg.mc_beta;
    req.fixed_beta = cfg.mc_fixed_beta;
    req.seed = cfg.seed + 0x9e37 * static_cast<std::uint64_t>(gp.index);
    const SampleSet set =
        cfg.method == "sa" ? run_sa(req) : run_svmc_tf(req, schedule);
    const KinkSummary sum = summarize_kinks(set, j_sign, cfg.r_max, cfg.n_resamples, req.seed);
    res.values["nbar"] = sum.kappa1;
    res.values["kappa2"] = sum.kappa2;
    res.values["kappa3"] = sum.kappa3;
    res.values["nbar_ci_lo"] = sum.density_ci.lo;
    res.values["nbar_ci_hi"] = sum.density_ci.hi;
    for (std::size_t r = 0; r < sum.ckk.size(); ++r)
      res.ckk.emplace_back(static_cast<int>(r) + 1, sum.ckk[r]);
  } else {
    throw std::runtime_error("run_point: method '" + cfg.method + "' has no grid runner");
  }
  return res;
}

}  // namespace

RunStatus run_experiment(const ExperimentConfig& config, const std::string& out_dir_override) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string out_dir = out_dir_override.empty() ? config.out_dir : out_dir_override;
  fs::create_directories(out_dir);
  const Schedule schedule = config.make_schedule();

  std::optional<KZConstants> kz;
  if (config.theory_overlay) {
    try {
      kz = schedule.kz_constants(std::abs(config.j_nominal));
    } catch (const std::exception&) {
      kz.reset();  // schedule without a crossing; no overlay columns
    }
  }

  json manifest;
  manifest["version"] = 1;
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = json::parse(config.raw_text);
  manifest["out_dir"] = out_dir;
  json failures = json::array();

  if (config.method == "shim") {
    SamplerRequest req;
    req.chain = ChainSpec::uniform(config.L_values.front(), config.j_nominal);
    if (config.sigma > 0.0) {
      DisorderSpec dspec{config.sigma, parse_target(config.disorder_target), 1, config.seed};
      req.chain = realize_disorder(req.chain, dspec, 0);
    }
    req.sweeps = std::max(1, static_cast<int>(std::lround(config.t_a_values.front())));
    req.beta = config.mc_beta;
    req.seed = config.seed;
    SvmcSampler sampler(req, schedule);
    const ShimState state = run_shim(sampler, config.shim, config.shim_iterations, config.seed);
    write_shim_csv(state, out_dir + "/shim.csv");
    const ShimReport rep = shim_report(state);
    manifest["shim_report"] = {{"std_m_before", rep.std_m_before},
                               {"std_m_after", rep.std_m_after},
                               {"std_f_before", rep.std_f_before},
                               {"std_f_after", rep.std_f_after}};
    manifest["outputs"] = {"shim.csv"};
  } else {
    std::vector<GridPoint> grid;
    for (int L : config.L_values)
      for (double t_a : config.t_a_values)
        for (int rep = 0; rep < (config.sigma > 0.0 ? config.n_realizations : 1); ++rep)
          grid.push_back({static_cast<int>(grid.size()), L, t_a, rep});

    std::vector<std::optional<PointResult>> results(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      try {
        results[i] = run_point(config, schedule, grid[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });

    CsvWriter rows(out_dir + "/results.csv",
                   {"index", "L", "j", "t_a", "sigma", "realization", "nbar",
                    "kappa2", "kappa3", "pgs", "nbar_ci_lo", "nbar_ci_hi", "discarded_weight",
                    "max_entropy", "theory_nbar", "theory_pgs"});
    std::optional<CsvWriter> ckk;
    if (config.r_max > 0)
      ckk.emplace(out_dir + "/ckk.csv",
                  std::vector<std::string>{"index", "L", "j", "t_a", "sigma", "realization", "r",
                                           "nbar", "ckk"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const GridPoint& gp = grid[i];
      if (!results[i]) {
        failures.push_back({{"index", gp.index}, {"error", errors[i]}});
        continue;
      }
      std::map<std::string, double> row = results[i]->values;
      row["index"] = gp.index;
      row["L"] = gp.L;
      row["j"] = config.j_nominal;
      row["t_a"] = gp.t_a;
      row["sigma"] = config.sigma;
      row["realization"] = gp.realization;
      if (kz) {
        row["theory_nbar"] = predict_density(kz->b_per_ns, gp.t_a);
        row["theory_pgs"] = predict_lz(kz->b_per_ns, gp.L, gp.t_a);
      }
      rows.row(row);
      if (ckk) {
        const double nbar = results[i]->values.count("nbar") ? results[i]->values.at("nbar") : 0.0;
        for (const auto& [r, v] : results[i]->ckk)
          ckk->row({{"index", static_cast<double>(gp.index)},
                    {"L", static_cast<double>(gp.L)},
                    {"j", config.j_nominal},
                    {"t_a", gp.t_a},
                    {"sigma", config.sigma},
                    {"realization", static_cast<double>(gp.realization)},
                    {"r", static_cast<double>(r)},
                    {"nbar", nbar},
                    {"ckk", v}});
      }
    }
    manifest["outputs"] = config.r_max > 0 ? json::array({"results.csv", "ckk.csv"})
                                           : json::array({"results.csv"});
    manifest["n_grid_points"] = grid.size();
  }

  manifest["failures"] = failures;
  manifest["wall_clock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream mf(out_dir + "/manifest.json");
  if (!mf) throw std::runtime_error("run_experiment: cannot write manifest");
  mf << manifest.dump(2) << "\n";
  return failures.empty() ? RunStatus::Ok : RunStatus::PartialFailure;
}

RunStatus analyze_samples(const std::vector<std::string>& files, const std::string& out_dir,
                          double j_sign, int r_max, int n_resamples, std::uint64_t seed) {
  if (files.empty()) throw std::runtime_error("analyze: no input files");
  fs::create_directories(out_dir);
  bool any_failed = false;
  for (const auto& file : files) {
    try {
      const SampleSet set = load_samples(file);
      const KinkSummary sum = summarize_kinks(set, j_sign, r_max, n_resamples, seed);
      const std::string stem = fs::path(file).stem().string();
      write_summary_json(sum, out_dir + "/" + stem + ".summary.json");
      write_ckk_csv(sum, out_dir + "/" + stem + ".ckk.csv");
    } catch (const std::exception& e) {
      throw std::runtime_error("analyze: " + file + ": " + e.what());
    }
  }
  return any_failed ? RunStatus::PartialFailure : RunStatus::Ok;
}

}  // namespace kz
