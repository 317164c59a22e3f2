#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kzchain/schedule.hpp"
#include "kzchain/shim.hpp"

namespace kz {

enum class RunStatus { Ok = 0, ConfigError = 2, PartialFailure = 3 };

// JSON-backed experiment description; unknown keys are rejected on parse.
struct ExperimentConfig {
  int version = 1;
  std::string method;  // modes | bdg | tebd | sa | svmc | shim | dense-oracle

  std::string schedule_kind = "linear";  // linear | quadratic | tabulated
  double schedule_beta = 1.0;            // GHz
  std::string schedule_csv;

  std::vector<int> L_values;
  double j_nominal = -1.0;

  std::vector<double> t_a_values;  // ns; for sa/svmc this is the sweep count

  double sigma = 0.0;
  std::string disorder_target = "couplings";  // couplings | fields | both
  int n_realizations = 1;
  bool sigma_scale_by_j = false;  // apply sigma * 1.4/|J|

  int tebd_D = 32;
  double tebd_dt = 0.01;

  int mc_samples = 100;
  int mc_batches = 10;
  double mc_beta = 32.0;
  bool mc_fixed_beta = false;

  int r_max = 0;  // 0 disables correlator output (except tebd: 0 -> skip too)
  int n_resamples = 1000;

  int shim_iterations = 300;
  ShimConfig shim;

  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool theory_overlay = true;

  std::string raw_text;  // verbatim config JSON, reproduced in the manifest

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  Schedule make_schedule() const;
  void validate() const;
};

// Executes the (L, t_a, realization) grid, writing results.csv, ckk.csv (when
// correlators were requested), shim.csv (shim method) and manifest.json to
// out_dir.  Failed grid points are recorded in the manifest and skipped.
RunStatus run_experiment(const ExperimentConfig& config, const std::string& out_dir_override = "");

// Stats pipeline over serialized SampleSets: writes <stem>.summary.json and
// <stem>.ckk.csv per input file.
RunStatus analyze_samples(const std::vector<std::string>& files, const std::string& out_dir,
                          double j_sign, int r_max, int n_resamples, std::uint64_t seed);

extern const char* const kToolVersion;

}  // namespace kz
