#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wm/attacks.hpp"
#include "wm/image.hpp"
#include "wm/watermark.hpp"

namespace wm {

// Gaussian-kernel density estimate on a uniform grid over [-1, 1].
struct EmpiricalPdf {
  std::vector<double> grid;    // ascending, default 2048 points
  std::vector<double> density; // nonnegative, integrates to 1
  double bandwidth = 0.0;
  std::size_t sample_count = 0;
};

struct DetectorModel {
  EmpiricalPdf pdf_h0, pdf_h1;
  double gamma = 0.0;         // likelihood-ratio threshold
  double rho_threshold = 0.0; // (1 - pfa) quantile of pdf_h0
  double target_pfa = 0.0;
  double achieved_pfa = 0.0;
  // Context the model was calibrated for.
  std::string wavelet;
  AttackSpec attack;
  // Lilliefors outcome on the H0 sample.
  double lilliefors_statistic = 0.0;
  bool lilliefors_reject = false;
};

enum class Hypothesis { H0, H1 };

struct Decision {
  Hypothesis by_likelihood_ratio;
  Hypothesis by_rho_threshold;
  // H1 if either test fires.  The quantile test backstops the likelihood
  // ratio, whose KDE-based tails go flat where no calibration samples
  // fall; without it a strong detection far above the H1 samples, or a
  // gap between the hypotheses' supports, reads as LR = 1.
  Hypothesis combined;
  double likelihood_ratio;
};

// Normal-reference bandwidth (1.06 sigma n^-1/5), 2048-point grid,
// renormalized so the trapezoidal integral is exactly 1.
EmpiricalPdf build_empirical_pdf(const std::vector<double> &samples,
                                 std::size_t grid_points = 2048);

double pdf_integral(const EmpiricalPdf &pdf); // trapezoidal, diagnostics
double pdf_quantile(const EmpiricalPdf &pdf, double p);

// Solves int_{L(x) > gamma} p0(x) dx = pfa by bisection on gamma.
struct NpThreshold {
  double gamma;
  double rho_threshold;
  double achieved_pfa;
};
NpThreshold np_threshold(const EmpiricalPdf &pdf_h0,
                         const EmpiricalPdf &pdf_h1, double pfa);

// Strict inequality: ties decide H0.
Decision decide(double rho0, const DetectorModel &model);

struct LillieforsResult {
  double statistic;
  bool reject_at_5pct;
};
LillieforsResult lilliefors(const std::vector<double> &samples);

struct CalibrationContext {
  std::string wavelet;
  AttackSpec attack;
  double alpha = 3.0;
  SubbandMask mask = all_subbands();
};

struct CalibrationSamples {
  std::vector<double> h1; // correct-watermark trials
  std::vector<double> h0; // alternating wrong-watermark / W = 0 trials
};

// Deterministic per-trial seeds derived from (master_seed, trial index).
CalibrationSamples
collect_rho_samples(const CalibrationContext &ctx,
                    const std::vector<Image> &images, std::size_t trials,
                    std::uint64_t master_seed);

DetectorModel calibrate(const CalibrationContext &ctx,
                        const std::vector<Image> &images, std::size_t trials,
                        double pfa, std::uint64_t master_seed);

// Diff-friendly CSV-section serialization of a DetectorModel.
std::string model_to_csv(const DetectorModel &model);
DetectorModel model_from_csv(const std::string &text);

} // namespace wm
