#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kzchain/experiment.hpp"
#include "kzchain/theory.hpp"

namespace {

using nlohmann::json;

int status_code(kz::RunStatus st) { return static_cast<int>(st); }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("JSON parse error in " + path + ": " + e.what());
  }
}

// Minimal CSV column extraction for the fit subcommand.
std::vector<std::pair<double, double>> read_csv_columns(const std::string& path,
                                                        const std::string& xcol,
                                                        const std::string& ycol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  const auto header = split(line);
  int xi = -1, yi = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == xcol) xi = static_cast<int>(i);
    if (header[i] == ycol) yi = static_cast<int>(i);
  }
  if (xi < 0 || yi < 0)
    throw std::runtime_error(path + ": missing column '" + (xi < 0 ? xcol : ycol) + "'");
  std::vector<std::pair<double, double>> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) <= std::max(xi, yi))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
    if (cells[xi].empty() || cells[yi].empty()) continue;
    out.emplace_back(std::stod(cells[xi]), std::stod(cells[yi]));
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out) {
  kz::ExperimentConfig cfg;
  try {
    cfg = kz::ExperimentConfig::from_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return status_code(kz::run_experiment(cfg, out));
}

int cmd_analyze(const std::string& config_path, const std::string& out) {
  json j;
  std::vector<std::string> files;
  double j_sign;
  int r_max, n_resamples;
  std::uint64_t seed;
  std::string out_dir;
  try {
    j = load_json(config_path);
    for (const auto& f : j.at("files")) files.push_back(f.get<std::string>());
    j_sign = j.value("j", -1.0);
    r_max = j.value("r_max", 0);
    n_resamples = j.value("n_resamples", 1000);
    seed = j.value("seed", std::uint64_t{0});
    out_dir = out.empty() ? j.value("out_dir", std::string("out")) : out;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return status_code(kz::analyze_samples(files, out_dir, j_sign, r_max, n_resamples, seed));
}

int cmd_theory(const std::string& config_path, const std::string& out) {
  json j;
  try {
    j = load_json(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  // Reuse the experiment schema for the schedule/chain/t_a blocks.
  json run_cfg = {{"method", "modes"},
                  {"schedule", j.value("schedule", json{{"kind", "linear"}, {"beta_ghz", 1.0}})},
                  {"chain", j.at("chain")},
                  {"t_a", j.at("t_a")}};
  kz::ExperimentConfig cfg;
  try {
    cfg = kz::ExperimentConfig::from_json_text(run_cfg.dump());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  const kz::Schedule schedule = cfg.make_schedule();
  const kz::KZConstants kzc = schedule.kz_constants(std::abs(cfg.j_nominal));
  const std::string out_dir = out.empty() ? "out" : out;
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/theory.csv");
  csv << "L,t_a,nbar,pgs\n";
  char buf[160];
  for (int L : cfg.L_values)
    for (double t : cfg.t_a_values) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", L, t,
                    kz::predict_density(kzc.b_per_ns, t), kz::predict_lz(kzc.b_per_ns, L, t));
      csv << buf;
    }
  json meta = {{"s_c", kzc.s_c}, {"b_per_ns", kzc.b_per_ns}};
  std::ofstream mf(out_dir + "/theory.json");
  mf << meta.dump(2) << "\n";
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& out) {
  json j;
  std::vector<std::pair<double, double>> points;
  std::string kind;
  std::optional<std::pair<double, double>> window;
  try {
    j = load_json(config_path);
    kind = j.value("kind", std::string("power"));
    if (kind != "power" && kind != "lz") throw std::runtime_error("fit kind must be power or lz");
    points = read_csv_columns(j.at("input").get<std::string>(),
                              j.value("x", std::string("t_a")),
                              j.value("y", kind == "power" ? std::string("nbar")
                                                           : std::string("pgs")));
    if (j.contains("window"))
      window = std::make_pair(j["window"][0].get<double>(), j["window"][1].get<double>());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  kz::FitResult fit;
  try {
    fit = kind == "power" ? kz::fit_power_law(points, window) : kz::fit_lz_exponent(points);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  json res = {{"kind", kind},         {"slope", fit.slope},
              {"intercept", fit.intercept}, {"slope_var", fit.slope_var},
              {"n_points", fit.n_points}};
  if (kind == "lz") res["a"] = -fit.slope;
  const std::string out_dir = out.empty() ? "out" : out;
  std::filesystem::create_directories(out_dir);
  std::ofstream of(out_dir + "/fit.json");
  of << res.dump(2) << "\n";
  std::printf("%s\n", res.dump().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quench dynamics toolkit for the annealed transverse-field Ising chain"};
  app.require_subcommand(1);

  std::string config_path, out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out, "Output directory (overrides config)");
  };
  auto* run = app.add_subcommand("run", "Execute an experiment grid");
  auto* analyze = app.add_subcommand("analyze", "Kink statistics over sample files");
  auto* theory = app.add_subcommand("theory", "Closed-form density / ground-state predictions");
  auto* fit = app.add_subcommand("fit", "Power-law or exponential-decay fits over CSV results");
  auto* shim = app.add_subcommand("shim", "Calibration-refinement loop");
  for (auto* sub : {run, analyze, theory, fit, shim}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out);
    if (analyze->parsed()) return cmd_analyze(config_path, out);
    if (theory->parsed()) return cmd_theory(config_path, out);
    if (fit->parsed()) return cmd_fit(config_path, out);
    if (shim->parsed()) {
      kz::ExperimentConfig cfg;
      try {
        cfg = kz::ExperimentConfig::from_file(config_path);
        if (cfg.method != "shim") throw std::runtime_error("shim subcommand requires method=shim");
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
      }
      return status_code(kz::run_experiment(cfg, out));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
