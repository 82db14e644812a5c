#include "wm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wm {

namespace {

constexpr double kDensityFloor = 1e-12;

double sample_std(const std::vector<double> &s, double &mean_out) {
  double m = 0.0;
  for (double v : s) m += v;
  m /= static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s) var += (v - m) * (v - m);
  var /= static_cast<double>(s.size() - 1);
  mean_out = m;
  return std::sqrt(var);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

EmpiricalPdf build_empirical_pdf(const std::vector<double> &samples,
                                 std::size_t grid_points) {
  if (samples.size() < 30)
    throw std::invalid_argument("build_empirical_pdf: need >= 30 samples, got " +
                                std::to_string(samples.size()));
  double m;
  double sd = sample_std(samples, m);
  if (sd == 0.0)
    throw std::invalid_argument("build_empirical_pdf: zero sample variance");
  const double n = static_cast<double>(samples.size());
  const double bw = 1.06 * sd * std::pow(n, -0.2);

  EmpiricalPdf pdf;
  pdf.bandwidth = bw;
  pdf.sample_count = samples.size();
  pdf.grid.resize(grid_points);
  pdf.density.assign(grid_points, 0.0);
  for (std::size_t i = 0; i < grid_points; ++i)
    pdf.grid[i] = -1.0 + 2.0 * static_cast<double>(i) /
                             static_cast<double>(grid_points - 1);

  // Kernel support is effectively +-6 bandwidths; sorting the samples
  // lets each grid point visit only its neighbors.
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const double reach = 6.0 * bw;
  const double inv = 1.0 / (n * bw * std::sqrt(2.0 * M_PI));
  for (std::size_t i = 0; i < grid_points; ++i) {
    double g = pdf.grid[i];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), g - reach);
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), g + reach);
    double acc = 0.0;
    for (auto it = lo; it != hi; ++it) {
      double z = (g - *it) / bw;
      acc += std::exp(-0.5 * z * z);
    }
    pdf.density[i] = acc * inv;
  }

  double integral = pdf_integral(pdf);
  if (integral <= 0.0)
    throw std::runtime_error("build_empirical_pdf: degenerate density");
  for (double &d : pdf.density) d /= integral;
  return pdf;
}

double pdf_integral(const EmpiricalPdf &pdf) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pdf.grid.size(); ++i)
    s += 0.5 * (pdf.density[i] + pdf.density[i + 1]) *
         (pdf.grid[i + 1] - pdf.grid[i]);
  return s;
}

double pdf_quantile(const EmpiricalPdf &pdf, double p) {
  if (p <= 0.0 || p >= 1.0)
    throw std::invalid_argument("pdf_quantile: p must be in (0,1)");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pdf.grid.size(); ++i) {
    double seg = 0.5 * (pdf.density[i] + pdf.density[i + 1]) *
                 (pdf.grid[i + 1] - pdf.grid[i]);
    if (acc + seg >= p) {
      double frac = seg > 0.0 ? (p - acc) / seg : 0.0;
      return pdf.grid[i] + frac * (pdf.grid[i + 1] - pdf.grid[i]);
    }
    acc += seg;
  }
  return pdf.grid.back();
}

namespace {

std::vector<double> likelihood_ratio_grid(const EmpiricalPdf &p0,
                                          const EmpiricalPdf &p1) {
  if (p0.grid != p1.grid)
    throw std::invalid_argument("np_threshold: pdfs on different grids");
  std::vector<double> lr(p0.grid.size());
  for (std::size_t i = 0; i < lr.size(); ++i)
    lr[i] = p1.density[i] / std::max(p0.density[i], kDensityFloor);
  return lr;
}

// Trapezoidal integral of p0 over the superlevel set {L > gamma}.  When
// the level boundary falls inside a cell, the crossing point is located
// by linear interpolation of L so the integral varies continuously with
// gamma (a pure cell-counting rule would quantize it to steps coarser
// than the bisection tolerance).
double superlevel_integral(const EmpiricalPdf &p0,
                           const std::vector<double> &lr, double gamma) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < lr.size(); ++i) {
    double dx = p0.grid[i + 1] - p0.grid[i];
    double d0 = p0.density[i], d1 = p0.density[i + 1];
    bool a = lr[i] > gamma, b = lr[i + 1] > gamma;
    if (a && b) {
      s += 0.5 * (d0 + d1) * dx;
    } else if (a != b) {
      double t = (gamma - lr[i]) / (lr[i + 1] - lr[i]); // crossing fraction
      t = std::clamp(t, 0.0, 1.0);
      double dt = d0 + t * (d1 - d0);
      if (a) // inside on the left of the crossing
        s += 0.5 * (d0 + dt) * t * dx;
      else // inside on the right of the crossing
        s += 0.5 * (dt + d1) * (1.0 - t) * dx;
    }
  }
  return s;
}

} // namespace

NpThreshold np_threshold(const EmpiricalPdf &pdf_h0, const EmpiricalPdf &pdf_h1,
                         double pfa) {
  if (pfa <= 0.0 || pfa > 0.5)
    throw std::invalid_argument("np_threshold: pfa must be in (0, 0.5]");
  std::vector<double> lr = likelihood_ratio_grid(pdf_h0, pdf_h1);

  double lo = 1e-6, hi = 1e6;
  double gamma = 1.0, achieved = superlevel_integral(pdf_h0, lr, gamma);
  double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (log_lo + log_hi);
    gamma = std::exp(mid);
    achieved = superlevel_integral(pdf_h0, lr, gamma);
    if (std::abs(achieved - pfa) <= 1e-6) break;
    // The integral decreases as gamma grows.
    if (achieved > pfa)
      log_lo = mid;
    else
      log_hi = mid;
  }
  return {gamma, pdf_quantile(pdf_h0, 1.0 - pfa), achieved};
}

Decision decide(double rho0, const DetectorModel &model) {
  if (rho0 < -1.0 || rho0 > 1.0)
    throw std::invalid_argument("decide: rho0 out of [-1, 1]");
  const auto &grid = model.pdf_h0.grid;
  // Linear interpolation of both densities at rho0.
  auto interp = [&](const EmpiricalPdf &pdf) {
    auto it = std::upper_bound(grid.begin(), grid.end(), rho0);
    if (it == grid.begin()) return pdf.density.front();
    if (it == grid.end()) return pdf.density.back();
    std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    double t = (rho0 - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - t) * pdf.density[i] + t * pdf.density[i + 1];
  };
  double p0 = std::max(interp(model.pdf_h0), kDensityFloor);
  double p1 = interp(model.pdf_h1);
  double lr = p1 / p0;
  Decision d;
  d.likelihood_ratio = lr;
  d.by_likelihood_ratio = lr > model.gamma ? Hypothesis::H1 : Hypothesis::H0;
  d.by_rho_threshold =
      rho0 > model.rho_threshold ? Hypothesis::H1 : Hypothesis::H0;
  d.combined = (d.by_likelihood_ratio == Hypothesis::H1 ||
                d.by_rho_threshold == Hypothesis::H1)
                   ? Hypothesis::H1
                   : Hypothesis::H0;
  return d;
}

LillieforsResult lilliefors(const std::vector<double> &samples) {
  const std::size_t n = samples.size();
  if (n < 5)
    throw std::invalid_argument("lilliefors: need >= 5 samples");
  double m;
  double sd = sample_std(samples, m);
  if (sd == 0.0)
    throw std::invalid_argument("lilliefors: zero sample variance");

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (samples[i] - m) / sd;
  std::sort(z.begin(), z.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cdf = normal_cdf(z[i]);
    double lo = static_cast<double>(i) / static_cast<double>(n);
    double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    d = std::max(d, std::max(cdf - lo, hi - cdf));
  }

  // Lilliefors 5% critical values; linear interpolation between tabled
  // n, asymptotic 0.886/sqrt(n) past the table.
  static const std::map<std::size_t, double> crit = {
      {5, 0.337},  {6, 0.319},  {7, 0.300},  {8, 0.285},  {9, 0.271},
      {10, 0.258}, {11, 0.249}, {12, 0.242}, {13, 0.234}, {14, 0.227},
      {15, 0.220}, {16, 0.213}, {17, 0.206}, {18, 0.200}, {19, 0.195},
      {20, 0.190}, {25, 0.173}, {30, 0.161}};
  double cv;
  if (n > 30) {
    cv = 0.886 / std::sqrt(static_cast<double>(n));
  } else {
    auto hi_it = crit.lower_bound(n);
    if (hi_it->first == n) {
      cv = hi_it->second;
    } else {
      auto lo_it = std::prev(hi_it);
      double t = static_cast<double>(n - lo_it->first) /
                 static_cast<double>(hi_it->first - lo_it->first);
      cv = lo_it->second + t * (hi_it->second - lo_it->second);
    }
  }
  return {d, d > cv};
}

CalibrationSamples collect_rho_samples(const CalibrationContext &ctx,
                                       const std::vector<Image> &images,
                                       std::size_t trials,
                                       std::uint64_t master_seed) {
  if (images.empty())
    throw std::invalid_argument("collect_rho_samples: no images");
  if (trials < 30)
    throw std::invalid_argument("collect_rho_samples: need >= 30 trials");
  WaveletSpec spec = standard_wavelet(ctx.wavelet);
  EmbeddingParams params;
  params.alpha = ctx.alpha;
  params.spec_name = ctx.wavelet;
  params.subband_mask = ctx.mask;

  // The W = 0 branch never touches the watermark, so the attacked
  // original is fixed per image.
  std::vector<Image> attacked_originals;
  std::vector<EstimatedWatermark> null_estimates;
  for (const Image &img : images) {
    Image att = apply_attack(img, ctx.attack);
    null_estimates.push_back(estimate_watermark(att, img, params, spec));
    attacked_originals.push_back(std::move(att));
  }

  CalibrationSamples out;
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint64_t wm_seed = master_seed ^ static_cast<std::uint64_t>(t);
    std::uint64_t wrong_seed = wm_seed ^ (1ULL << 63);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const Image &img = images[i];
      Watermark w =
          generate_watermark(wm_seed, img.rows(), img.cols(), ctx.mask);
      Image attacked = apply_attack(embed(img, w, params, spec), ctx.attack);
      EstimatedWatermark est = estimate_watermark(attacked, img, params, spec);
      out.h1.push_back(correlation_or_zero(w, est));
      if (t % 2 == 0) {
        // Mismatch category 1: attacker embedded a different watermark.
        Watermark wrong =
            generate_watermark(wrong_seed, img.rows(), img.cols(), ctx.mask);
        out.h0.push_back(correlation_or_zero(wrong, est));
      } else {
        // Mismatch category 2: W = 0, image never watermarked.
        out.h0.push_back(correlation_or_zero(w, null_estimates[i]));
      }
    }
  }
  return out;
}

DetectorModel calibrate(const CalibrationContext &ctx,
                        const std::vector<Image> &images, std::size_t trials,
                        double pfa, std::uint64_t master_seed) {
  CalibrationSamples s = collect_rho_samples(ctx, images, trials, master_seed);
  DetectorModel model;
  model.pdf_h0 = build_empirical_pdf(s.h0);
  model.pdf_h1 = build_empirical_pdf(s.h1);
  NpThreshold th = np_threshold(model.pdf_h0, model.pdf_h1, pfa);
  model.gamma = th.gamma;
  model.rho_threshold = th.rho_threshold;
  model.achieved_pfa = th.achieved_pfa;
  model.target_pfa = pfa;
  model.wavelet = ctx.wavelet;
  model.attack = ctx.attack;
  LillieforsResult lf = lilliefors(s.h0);
  model.lilliefors_statistic = lf.statistic;
  model.lilliefors_reject = lf.reject_at_5pct;
  return model;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::string model_to_csv(const DetectorModel &m) {
  std::ostringstream out;
  out << "[meta]\n";
  out << "wavelet," << m.wavelet << "\n";
  out << "attack_kind,"
      << (m.attack.kind == AttackKind::jpeg_like
              ? "jpeg"
              : m.attack.kind == AttackKind::jpeg2000_like ? "jpeg2000"
                                                           : "none")
      << "\n";
  out << "attack_quality," << m.attack.quality << "\n";
  out << "attack_bitrate," << fmt(m.attack.bitrate) << "\n";
  out << "gamma," << fmt(m.gamma) << "\n";
  out << "rho_threshold," << fmt(m.rho_threshold) << "\n";
  out << "target_pfa," << fmt(m.target_pfa) << "\n";
  out << "achieved_pfa," << fmt(m.achieved_pfa) << "\n";
  out << "lilliefors_statistic," << fmt(m.lilliefors_statistic) << "\n";
  out << "lilliefors_reject," << (m.lilliefors_reject ? 1 : 0) << "\n";
  out << "h0_bandwidth," << fmt(m.pdf_h0.bandwidth) << "\n";
  out << "h0_samples," << m.pdf_h0.sample_count << "\n";
  out << "h1_bandwidth," << fmt(m.pdf_h1.bandwidth) << "\n";
  out << "h1_samples," << m.pdf_h1.sample_count << "\n";
  out << "[grid]\n";
  out << "rho,h0_density,h1_density\n";
  for (std::size_t i = 0; i < m.pdf_h0.grid.size(); ++i)
    out << fmt(m.pdf_h0.grid[i]) << "," << fmt(m.pdf_h0.density[i]) << ","
        << fmt(m.pdf_h1.density[i]) << "\n";
  return out.str();
}

DetectorModel model_from_csv(const std::string &text) {
  DetectorModel m;
  std::istringstream in(text);
  std::string line;
  enum { none, meta, grid } section = none;
  bool grid_header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "[meta]") {
      section = meta;
      continue;
    }
    if (line == "[grid]") {
      section = grid;
      continue;
    }
    if (section == meta) {
      auto pos = line.find(',');
      if (pos == std::string::npos) continue;
      std::string key = line.substr(0, pos), val = line.substr(pos + 1);
      if (key == "wavelet") m.wavelet = val;
      else if (key == "attack_kind")
        m.attack.kind = val == "jpeg" ? AttackKind::jpeg_like
                        : val == "jpeg2000" ? AttackKind::jpeg2000_like
                                            : AttackKind::none;
      else if (key == "attack_quality") m.attack.quality = std::stoi(val);
      else if (key == "attack_bitrate") m.attack.bitrate = std::stod(val);
      else if (key == "gamma") m.gamma = std::stod(val);
      else if (key == "rho_threshold") m.rho_threshold = std::stod(val);
      else if (key == "target_pfa") m.target_pfa = std::stod(val);
      else if (key == "achieved_pfa") m.achieved_pfa = std::stod(val);
      else if (key == "lilliefors_statistic")
        m.lilliefors_statistic = std::stod(val);
      else if (key == "lilliefors_reject") m.lilliefors_reject = val == "1";
      else if (key == "h0_bandwidth") m.pdf_h0.bandwidth = std::stod(val);
      else if (key == "h0_samples") m.pdf_h0.sample_count = std::stoul(val);
      else if (key == "h1_bandwidth") m.pdf_h1.bandwidth = std::stod(val);
      else if (key == "h1_samples") m.pdf_h1.sample_count = std::stoul(val);
    } else if (section == grid) {
      if (!grid_header_seen) {
        grid_header_seen = true;
        continue;
      }
      std::stringstream ss(line);
      std::string a, b, c;
      std::getline(ss, a, ',');
      std::getline(ss, b, ',');
      std::getline(ss, c, ',');
      m.pdf_h0.grid.push_back(std::stod(a));
      m.pdf_h0.density.push_back(std::stod(b));
      m.pdf_h1.density.push_back(std::stod(c));
    }
  }
  if (m.pdf_h0.grid.empty())
    throw std::runtime_error("model_from_csv: missing [grid] section");
  m.pdf_h1.grid = m.pdf_h0.grid;
  return m;
}

} // namespace wm
