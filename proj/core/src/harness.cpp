#include "wm/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "wm/metrics.hpp"

namespace wm {

namespace {

std::vector<std::string> split_csv(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    // trim
    std::size_t a = tok.find_first_not_of(" \t");
    std::size_t b = tok.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)> &fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::size_t width = std::min<std::size_t>(jobs, n);
  for (std::size_t t = 0; t < width; ++t)
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += width) fn(i);
    });
  for (auto &th : threads) th.join();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

} // namespace

ExperimentConfig load_config(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t");
      std::size_t y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    key = trim(key);
    val = trim(val);
    if (key == "images") cfg.image_paths = split_csv(val);
    else if (key == "holdout_images") cfg.holdout_paths = split_csv(val);
    else if (key == "holdout") cfg.enforce_holdout = val == "1" || val == "true";
    else if (key == "wavelets") cfg.wavelets = split_csv(val);
    else if (key == "jpeg_qualities") {
      cfg.jpeg_qualities.clear();
      for (auto &t : split_csv(val)) cfg.jpeg_qualities.push_back(std::stoi(t));
    } else if (key == "jpeg2000_bitrates") {
      cfg.jpeg2000_bitrates.clear();
      for (auto &t : split_csv(val))
        cfg.jpeg2000_bitrates.push_back(std::stod(t));
    } else if (key == "alphas") {
      cfg.alphas.clear();
      for (auto &t : split_csv(val)) cfg.alphas.push_back(std::stod(t));
    } else if (key == "alpha") cfg.alpha = std::stod(val);
    else if (key == "subbands") cfg.mask = parse_subband_mask(val);
    else if (key == "calibration_trials")
      cfg.calibration_trials = std::stoul(val);
    else if (key == "evaluation_trials") cfg.evaluation_trials = std::stoul(val);
    else if (key == "seed") cfg.master_seed = std::stoull(val);
    else if (key == "pfa") cfg.pfa = std::stod(val);
    else if (key == "output_dir") cfg.output_dir = val;
    else if (key == "jobs") cfg.jobs = static_cast<unsigned>(std::stoul(val));
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
  return cfg;
}

void validate_config(const ExperimentConfig &cfg) {
  if (cfg.image_paths.empty())
    throw std::runtime_error("config: no images given");
  for (const auto &p : cfg.image_paths)
    if (!std::filesystem::exists(p))
      throw std::runtime_error("config: missing image " + p);
  for (const auto &p : cfg.holdout_paths)
    if (!std::filesystem::exists(p))
      throw std::runtime_error("config: missing holdout image " + p);
  if (cfg.enforce_holdout) {
    std::set<std::string> cal(cfg.image_paths.begin(), cfg.image_paths.end());
    for (const auto &p : cfg.holdout_paths)
      if (cal.count(p))
        throw std::runtime_error(
            "config: holdout set shares path with calibration set: " + p);
  }
  for (const auto &w : cfg.wavelets) standard_wavelet(w); // throws on unknown
  if (cfg.pfa <= 0.0 || cfg.pfa > 0.5)
    throw std::runtime_error("config: pfa must be in (0, 0.5]");
}

std::vector<Image> load_images(const std::vector<std::string> &paths) {
  std::vector<Image> out;
  for (const auto &p : paths) out.push_back(read_pgm_file(p));
  return out;
}

std::vector<QualitySweepRow> quality_sweep(const ExperimentConfig &cfg,
                                           const std::vector<Image> &images) {
  std::vector<QualitySweepRow> rows;
  const std::vector<std::pair<std::string, SubbandMask>> masks = {
      {"all", all_subbands()}, {"high", high_subbands()}};
  for (const auto &wname : cfg.wavelets) {
    WaveletSpec spec = standard_wavelet(wname);
    for (const auto &[mname, mask] : masks) {
      for (double alpha : cfg.alphas) {
        double acc = 0.0;
        for (const Image &img : images) {
          Image marked = [&] {
            if (alpha == 0.0) return img; // zero strength: quantization only
            Watermark w = generate_watermark(cfg.master_seed, img.rows(),
                                             img.cols(), mask);
            EmbeddingParams p{alpha, wname, mask};
            return embed(img, w, p, spec);
          }();
          acc += uqi(img, quantize8(marked));
        }
        rows.push_back(
            {wname, mname, alpha, acc / static_cast<double>(images.size())});
      }
    }
  }
  return rows;
}

std::string quality_sweep_csv(const std::vector<QualitySweepRow> &rows) {
  std::ostringstream out;
  out << "wavelet,mask,alpha,mean_uqi\n";
  for (const auto &r : rows)
    out << r.wavelet << "," << r.mask << "," << fmt(r.alpha) << ","
        << fmt(r.mean_uqi) << "\n";
  return out.str();
}

WilsonInterval wilson95(std::size_t successes, std::size_t n) {
  if (n == 0) throw std::invalid_argument("wilson95: n must be positive");
  if (successes > n)
    throw std::invalid_argument("wilson95: successes exceed trials");
  const double z = 1.959963984540054;
  double nn = static_cast<double>(n);
  double p = static_cast<double>(successes) / nn;
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double center = (p + z2 / (2.0 * nn)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {center - half, center + half};
}

RateEstimate estimate_rates(const ExperimentConfig &cfg,
                            const DetectorModel &model,
                            const std::vector<Image> &images) {
  if (images.empty()) throw std::runtime_error("estimate_rates: no images");
  WaveletSpec spec = standard_wavelet(model.wavelet);
  EmbeddingParams params{cfg.alpha, model.wavelet, cfg.mask};

  // W = 0 estimates are watermark-independent, compute them once.
  std::vector<EstimatedWatermark> null_estimates;
  for (const Image &img : images)
    null_estimates.push_back(
        estimate_watermark(apply_attack(img, model.attack), img, params, spec));

  const std::size_t trials = cfg.evaluation_trials;
  const std::size_t per_trial = images.size();
  std::vector<char> detect(trials * per_trial), alarm(trials * per_trial);

  parallel_for(trials, cfg.jobs, [&](std::size_t t) {
    // Evaluation streams are offset from calibration streams.
    std::uint64_t wm_seed =
        cfg.master_seed ^ 0xe7a1u ^ (static_cast<std::uint64_t>(t) << 16);
    std::uint64_t wrong_seed = wm_seed ^ (1ULL << 63);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const Image &img = images[i];
      Watermark w =
          generate_watermark(wm_seed, img.rows(), img.cols(), cfg.mask);
      Image attacked =
          apply_attack(embed(img, w, params, spec), model.attack);
      EstimatedWatermark est = estimate_watermark(attacked, img, params, spec);
      double rho1 = correlation_or_zero(w, est);
      detect[t * per_trial + i] =
          decide(rho1, model).combined == Hypothesis::H1;
      double rho0;
      if (t % 2 == 0) {
        Watermark wrong =
            generate_watermark(wrong_seed, img.rows(), img.cols(), cfg.mask);
        rho0 = correlation_or_zero(wrong, est);
      } else {
        rho0 = correlation_or_zero(w, null_estimates[i]);
      }
      alarm[t * per_trial + i] =
          decide(rho0, model).combined == Hypothesis::H1;
    }
  });

  std::size_t nd = 0, nf = 0, n = trials * per_trial;
  for (char d : detect) nd += d;
  for (char a : alarm) nf += a;
  RateEstimate r;
  r.trials = n;
  r.p_d = static_cast<double>(nd) / static_cast<double>(n);
  r.p_fa = static_cast<double>(nf) / static_cast<double>(n);
  auto wd = wilson95(nd, n);
  auto wf = wilson95(nf, n);
  r.p_d_lo = wd.lo;
  r.p_d_hi = wd.hi;
  r.p_fa_lo = wf.lo;
  r.p_fa_hi = wf.hi;
  return r;
}

BoxStats box_stats(std::vector<double> s) {
  if (s.empty()) throw std::invalid_argument("box_stats: empty sample");
  std::sort(s.begin(), s.end());
  auto quantile = [&](double p) {
    double idx = p * static_cast<double>(s.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    double frac = idx - static_cast<double>(lo);
    return lo + 1 < s.size() ? s[lo] * (1.0 - frac) + s[lo + 1] * frac : s[lo];
  };
  BoxStats b;
  b.q1 = quantile(0.25);
  b.median = quantile(0.5);
  b.q3 = quantile(0.75);
  double iqr = b.q3 - b.q1;
  double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = s.back();
  b.whisker_hi = s.front();
  double sum = 0.0;
  for (double v : s) {
    sum += v;
    if (v >= lo_fence && v < b.whisker_lo) b.whisker_lo = v;
    if (v <= hi_fence && v > b.whisker_hi) b.whisker_hi = v;
  }
  b.mean = sum / static_cast<double>(s.size());
  return b;
}

std::vector<SubbandReportRow> subband_report(const ExperimentConfig &cfg,
                                             const AttackSpec &attack,
                                             const std::vector<Image> &images) {
  if (mask_to_string(cfg.mask) != mask_to_string(all_subbands()))
    throw std::runtime_error("subband_report: requires the all-subbands mask");
  std::vector<SubbandReportRow> rows;
  const std::size_t trials = cfg.calibration_trials;
  for (const auto &wname : cfg.wavelets) {
    WaveletSpec spec = standard_wavelet(wname);
    EmbeddingParams params{cfg.alpha, wname, cfg.mask};
    std::vector<std::vector<double>> rho(4,
                                         std::vector<double>(trials * images.size()));
    parallel_for(trials, cfg.jobs, [&](std::size_t t) {
      std::uint64_t wm_seed =
          cfg.master_seed ^ 0x5bbdu ^ (static_cast<std::uint64_t>(t) << 16);
      for (std::size_t i = 0; i < images.size(); ++i) {
        const Image &img = images[i];
        Watermark w =
            generate_watermark(wm_seed, img.rows(), img.cols(), cfg.mask);
        Image attacked = apply_attack(embed(img, w, params, spec), attack);
        EstimatedWatermark est =
            estimate_watermark(attacked, img, params, spec);
        for (std::size_t b = 0; b < 4; ++b)
          rho[b][t * images.size() + i] =
              correlation(w, est, static_cast<Subband>(b));
      }
    });
    for (std::size_t b = 0; b < 4; ++b) {
      BoxStats st = box_stats(rho[b]);
      rows.push_back({wname, attack_to_string(attack),
                      subband_name(static_cast<Subband>(b)), st.mean, st.q1,
                      st.median, st.q3, st.whisker_lo, st.whisker_hi, rho[b]});
    }
  }
  return rows;
}

std::string subband_report_csv(const std::vector<SubbandReportRow> &rows,
                               bool include_samples) {
  std::ostringstream out;
  out << "wavelet,attack,subband,mean,q1,median,q3,whisker_lo,whisker_hi\n";
  for (const auto &r : rows) {
    out << r.wavelet << "," << r.attack << "," << r.band << "," << fmt(r.mean)
        << "," << fmt(r.q1) << "," << fmt(r.median) << "," << fmt(r.q3) << ","
        << fmt(r.whisker_lo) << "," << fmt(r.whisker_hi) << "\n";
  }
  if (include_samples) {
    out << "\nwavelet,attack,subband,trial,rho\n";
    for (const auto &r : rows)
      for (std::size_t t = 0; t < r.samples.size(); ++t)
        out << r.wavelet << "," << r.attack << "," << r.band << "," << t << ","
            << fmt(r.samples[t]) << "\n";
  }
  return out.str();
}

std::string run_experiment(const ExperimentConfig &cfg) {
  using clock = std::chrono::steady_clock;
  validate_config(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  auto outfile = [&](const std::string &name, const std::string &content) {
    std::ofstream f(std::filesystem::path(cfg.output_dir) / name,
                    std::ios::trunc);
    f << content;
  };

  std::ostringstream manifest;
  manifest << "experiment manifest\n";
  manifest << "seed=" << cfg.master_seed << "\n";
  manifest << "alpha=" << fmt(cfg.alpha) << "\n";
  manifest << "subbands=" << mask_to_string(cfg.mask) << "\n";
  manifest << "pfa=" << fmt(cfg.pfa) << "\n";
  manifest << "calibration_trials=" << cfg.calibration_trials << "\n";
  manifest << "evaluation_trials=" << cfg.evaluation_trials << "\n";
  manifest << "images=";
  for (const auto &p : cfg.image_paths) manifest << p << ";";
  manifest << "\nholdout=";
  for (const auto &p : cfg.holdout_paths) manifest << p << ";";
  manifest << "\n";

  auto stage = [&](const std::string &name, auto &&fn) {
    auto t0 = clock::now();
    try {
      fn();
    } catch (const std::exception &e) {
      manifest << "stage " << name << " FAILED: " << e.what() << "\n";
      outfile("manifest.txt", manifest.str());
      throw std::runtime_error("experiment stage '" + name + "' failed: " +
                               e.what());
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  clock::now() - t0)
                  .count();
    manifest << "stage " << name << " ok (" << ms << " ms)\n";
  };

  std::vector<Image> images = load_images(cfg.image_paths);
  std::vector<Image> holdout = cfg.holdout_paths.empty()
                                   ? images
                                   : load_images(cfg.holdout_paths);

  stage("jsd_tables", [&] {
    for (const auto &wname : cfg.wavelets) {
      WaveletSpec spec = standard_wavelet(wname);
      // Mean 5x5 table over the calibration images.
      std::array<std::array<double, 5>, 5> acc{};
      for (const Image &img : images) {
        auto t = jsd_table(img, spec);
        for (std::size_t i = 0; i < 5; ++i)
          for (std::size_t j = 0; j < 5; ++j) acc[i][j] += t[i][j];
      }
      const char *labels[] = {"original", "LL", "LH", "HL", "HH"};
      std::ostringstream out;
      out << "band,original,LL,LH,HL,HH\n";
      for (std::size_t i = 0; i < 5; ++i) {
        out << labels[i];
        for (std::size_t j = 0; j < 5; ++j)
          out << "," << fmt(acc[i][j] / static_cast<double>(images.size()));
        out << "\n";
      }
      outfile("jsd_" + wname + ".csv", out.str());
    }
  });

  stage("quality_sweep", [&] {
    outfile("quality_sweep.csv", quality_sweep_csv(quality_sweep(cfg, images)));
  });

  std::vector<AttackSpec> grid;
  for (int q : cfg.jpeg_qualities)
    grid.push_back({AttackKind::jpeg_like, q, 0.0});
  for (double b : cfg.jpeg2000_bitrates)
    grid.push_back({AttackKind::jpeg2000_like, 0, b});

  std::vector<DetectorModel> worst_models;
  stage("calibration_grid", [&] {
    std::ostringstream summary;
    summary << "wavelet,attack,mean_h1,mean_h0,gamma,rho_threshold,"
               "achieved_pfa,lilliefors_stat,lilliefors_reject\n";
    for (const auto &wname : cfg.wavelets) {
      for (const AttackSpec &atk : grid) {
        CalibrationContext ctx{wname, atk, cfg.alpha, cfg.mask};
        CalibrationSamples s = collect_rho_samples(
            ctx, images, cfg.calibration_trials, cfg.master_seed);
        DetectorModel model;
        model.pdf_h0 = build_empirical_pdf(s.h0);
        model.pdf_h1 = build_empirical_pdf(s.h1);
        NpThreshold th = np_threshold(model.pdf_h0, model.pdf_h1, cfg.pfa);
        model.gamma = th.gamma;
        model.rho_threshold = th.rho_threshold;
        model.achieved_pfa = th.achieved_pfa;
        model.target_pfa = cfg.pfa;
        model.wavelet = wname;
        model.attack = atk;
        auto lf = lilliefors(s.h0);
        model.lilliefors_statistic = lf.statistic;
        model.lilliefors_reject = lf.reject_at_5pct;
        double m1 = 0, m0 = 0;
        for (double v : s.h1) m1 += v;
        for (double v : s.h0) m0 += v;
        m1 /= static_cast<double>(s.h1.size());
        m0 /= static_cast<double>(s.h0.size());
        summary << wname << "," << attack_to_string(atk) << "," << fmt(m1)
                << "," << fmt(m0) << "," << fmt(model.gamma) << ","
                << fmt(model.rho_threshold) << "," << fmt(model.achieved_pfa)
                << "," << fmt(model.lilliefors_statistic) << ","
                << (model.lilliefors_reject ? 1 : 0) << "\n";
        std::string atkname = attack_to_string(atk);
        for (char &c : atkname)
          if (c == '@' || c == '=' || c == '.') c = '_';
        outfile("model_" + wname + "_" + atkname + ".csv",
                model_to_csv(model));
        // Worst-case cells drive the rate estimation stage.
        bool worst_jpeg = atk.kind == AttackKind::jpeg_like &&
                          atk.quality == *std::min_element(
                                             cfg.jpeg_qualities.begin(),
                                             cfg.jpeg_qualities.end());
        bool worst_j2k =
            atk.kind == AttackKind::jpeg2000_like &&
            atk.bitrate == *std::min_element(cfg.jpeg2000_bitrates.begin(),
                                             cfg.jpeg2000_bitrates.end());
        if (wname == cfg.wavelets.back() && (worst_jpeg || worst_j2k))
          worst_models.push_back(model);
      }
    }
    outfile("calibration_summary.csv", summary.str());
  });

  stage("rate_estimation", [&] {
    std::ostringstream out;
    out << "wavelet,attack,p_d,p_d_lo,p_d_hi,p_fa,p_fa_lo,p_fa_hi,trials\n";
    for (const DetectorModel &model : worst_models) {
      RateEstimate r = estimate_rates(cfg, model, holdout);
      out << model.wavelet << "," << attack_to_string(model.attack) << ","
          << fmt(r.p_d) << "," << fmt(r.p_d_lo) << "," << fmt(r.p_d_hi) << ","
          << fmt(r.p_fa) << "," << fmt(r.p_fa_lo) << "," << fmt(r.p_fa_hi)
          << "," << r.trials << "\n";
    }
    outfile("rates.csv", out.str());
  });

  stage("subband_report", [&] {
    if (!cfg.jpeg_qualities.empty()) {
      AttackSpec atk{AttackKind::jpeg_like,
                     *std::min_element(cfg.jpeg_qualities.begin(),
                                       cfg.jpeg_qualities.end()),
                     0.0};
      outfile("subband_report.csv",
              subband_report_csv(subband_report(cfg, atk, images)));
    }
  });

  outfile("manifest.txt", manifest.str());
  return manifest.str();
}

} // namespace wm
