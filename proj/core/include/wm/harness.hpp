#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wm/attacks.hpp"
#include "wm/detector.hpp"
#include "wm/image.hpp"
#include "wm/watermark.hpp"

namespace wm {

struct ExperimentConfig {
  std::vector<std::string> image_paths;   // calibration set
  std::vector<std::string> holdout_paths; // evaluation set (rates)
  bool enforce_holdout = false;           // fail on path overlap
  std::vector<std::string> wavelets = {"daubechies4", "daubechies8",
                                       "coiflet6", "biorthogonal6.2", "grs4"};
  std::vector<int> jpeg_qualities = {10, 30, 50, 70, 90};
  std::vector<double> jpeg2000_bitrates = {0.25, 0.5, 1.0, 2.0};
  std::vector<double> alphas = {0.5, 1.0, 2.0, 3.0, 3.5, 5.0};
  double alpha = 3.0;
  SubbandMask mask = all_subbands();
  std::size_t calibration_trials = 100;
  std::size_t evaluation_trials = 1000;
  std::uint64_t master_seed = 42;
  double pfa = 0.01;
  std::string output_dir = "out";
  unsigned jobs = 1;
};

// Flat key=value file; '#' starts a comment.  Lists are comma-separated.
ExperimentConfig load_config(const std::string &path);
void validate_config(const ExperimentConfig &cfg);
std::vector<Image> load_images(const std::vector<std::string> &paths);

struct QualitySweepRow {
  std::string wavelet;
  std::string mask;
  double alpha;
  double mean_uqi;
};
// Fixed seed per sweep; UQI measured after 8-bit quantization.
std::vector<QualitySweepRow> quality_sweep(const ExperimentConfig &cfg,
                                           const std::vector<Image> &images);
std::string quality_sweep_csv(const std::vector<QualitySweepRow> &rows);

struct RateEstimate {
  double p_d, p_fa;
  double p_d_lo, p_d_hi; // Wilson 95% interval
  double p_fa_lo, p_fa_hi;
  std::size_t trials;
};
RateEstimate estimate_rates(const ExperimentConfig &cfg,
                            const DetectorModel &model,
                            const std::vector<Image> &images);

struct SubbandReportRow {
  std::string wavelet;
  std::string attack;
  std::string band;
  double mean, q1, median, q3, whisker_lo, whisker_hi;
  std::vector<double> samples;
};
std::vector<SubbandReportRow> subband_report(const ExperimentConfig &cfg,
                                             const AttackSpec &attack,
                                             const std::vector<Image> &images);
std::string subband_report_csv(const std::vector<SubbandReportRow> &rows,
                               bool include_samples = false);

// Runs every stage and writes the CSV bundle plus a manifest into
// cfg.output_dir.  Returns the manifest text.
std::string run_experiment(const ExperimentConfig &cfg);

// Mean/quartiles/1.5-IQR whiskers of a sample.
struct BoxStats {
  double mean, q1, median, q3, whisker_lo, whisker_hi;
};
BoxStats box_stats(std::vector<double> samples);

struct WilsonInterval {
  double lo, hi;
};
WilsonInterval wilson95(std::size_t successes, std::size_t n);

} // namespace wm
