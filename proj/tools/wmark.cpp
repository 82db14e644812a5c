// Command-line front end: filter inspection, transforms, embedding,
// attacks, detection, calibration, and the full experiment driver.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wm/attacks.hpp"
#include "wm/detector.hpp"
#include "wm/dwt2d.hpp"
#include "wm/filterbank.hpp"
#include "wm/fixtures.hpp"
#include "wm/harness.hpp"
#include "wm/image.hpp"
#include "wm/metrics.hpp"
#include "wm/watermark.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> expand_images(const std::vector<std::string> &args) {
  std::vector<std::string> paths;
  for (const auto &a : args) {
    if (fs::is_directory(a)) {
      std::vector<std::string> found;
      for (const auto &e : fs::directory_iterator(a))
        if (e.path().extension() == ".pgm") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else {
      paths.push_back(a);
    }
  }
  if (paths.empty()) throw std::invalid_argument("no images found");
  return paths;
}

void write_raw_sidecar(const wm::Matrix &m, const std::string &path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path);
  char header[16] = {};
  std::memcpy(header, "WMRAW\0\0\0", 8);
  std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  std::memcpy(header + 8, &rows, 4);
  std::memcpy(header + 12, &cols, 4);
  f.write(header, 16);
  f.write(reinterpret_cast<const char *>(m.data().data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
}

wm::AttackSpec attack_from_flags(const std::string &kind, int q, double bpp) {
  wm::AttackSpec spec;
  if (kind == "jpeg") {
    spec.kind = wm::AttackKind::jpeg_like;
    spec.quality = q;
  } else if (kind == "jpeg2000") {
    spec.kind = wm::AttackKind::jpeg2000_like;
    spec.bitrate = bpp;
  } else if (kind == "none") {
    spec.kind = wm::AttackKind::none;
  } else {
    throw std::invalid_argument("unknown attack kind '" + kind +
                                "' (jpeg|jpeg2000|none)");
  }
  return spec;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"wavelet-domain image watermarking toolkit"};
  app.require_subcommand(1);

  // --- dump-filters ---
  auto *sc_dump = app.add_subcommand(
      "dump-filters", "print wavelet coefficient tables and PR residuals");

  // --- dwt ---
  auto *sc_dwt = app.add_subcommand("dwt", "decompose a PGM into subbands");
  std::string dwt_wavelet = "grs4", dwt_in, dwt_out_prefix;
  sc_dwt->add_option("--wavelet", dwt_wavelet, "wavelet name");
  sc_dwt->add_option("input", dwt_in, "input PGM")->required();
  sc_dwt->add_option("output_prefix", dwt_out_prefix, "output prefix")
      ->required();

  // --- embed ---
  auto *sc_embed = app.add_subcommand("embed", "embed a watermark");
  std::string em_wavelet = "grs4", em_subbands = "ll,lh,hl,hh", em_in, em_out;
  double em_alpha = 3.0;
  std::uint64_t em_seed = 1;
  sc_embed->add_option("--wavelet", em_wavelet);
  sc_embed->add_option("--alpha", em_alpha);
  sc_embed->add_option("--seed", em_seed);
  sc_embed->add_option("--subbands", em_subbands);
  sc_embed->add_option("input", em_in)->required();
  sc_embed->add_option("output", em_out)->required();

  // --- attack ---
  auto *sc_attack = app.add_subcommand("attack", "lossy-compression attack");
  std::string at_kind = "jpeg", at_in, at_out, at_external;
  int at_q = 50;
  double at_bpp = 1.0;
  sc_attack->add_option("--kind", at_kind, "jpeg|jpeg2000|none");
  sc_attack->add_option("--q", at_q, "jpeg quality 1..100");
  sc_attack->add_option("--bpp", at_bpp, "jpeg2000 bitrate");
  sc_attack->add_option("--external-cmd", at_external,
                        "shell out to a codec: CMD {in} {out}");
  sc_attack->add_option("input", at_in)->required();
  sc_attack->add_option("output", at_out)->required();

  // --- detect ---
  auto *sc_detect = app.add_subcommand("detect", "correlate a suspect image");
  std::string de_orig, de_suspect, de_wavelet = "grs4",
              de_subbands = "ll,lh,hl,hh", de_model;
  double de_alpha = 3.0;
  std::uint64_t de_seed = 1;
  sc_detect->add_option("--original", de_orig)->required();
  sc_detect->add_option("--suspect", de_suspect)->required();
  sc_detect->add_option("--wavelet", de_wavelet);
  sc_detect->add_option("--alpha", de_alpha);
  sc_detect->add_option("--seed", de_seed);
  sc_detect->add_option("--subbands", de_subbands);
  sc_detect->add_option("--model", de_model,
                        "optional DetectorModel CSV for a decision");

  // --- metrics ---
  auto *sc_metrics = app.add_subcommand("metrics", "image quality metrics");
  std::vector<std::string> me_uqi;
  std::string me_jsd, me_wavelet = "grs4";
  std::size_t me_stride = 1;
  sc_metrics->add_option("--uqi", me_uqi, "two PGMs to compare")
      ->expected(2);
  sc_metrics->add_option("--jsd-table", me_jsd, "image for the 5x5 JSD table");
  sc_metrics->add_option("--wavelet", me_wavelet);
  sc_metrics->add_option("--stride", me_stride, "UQI window stride");

  // --- calibrate ---
  auto *sc_cal = app.add_subcommand("calibrate", "build a detector model");
  std::string ca_wavelet = "grs4", ca_attack = "jpeg", ca_out = "model.csv",
              ca_subbands = "ll,lh,hl,hh";
  std::vector<std::string> ca_images;
  int ca_q = 10;
  double ca_bpp = 0.25, ca_pfa = 0.01, ca_alpha = 3.0;
  std::size_t ca_trials = 300;
  std::uint64_t ca_seed = 42;
  sc_cal->add_option("--wavelet", ca_wavelet);
  sc_cal->add_option("--attack", ca_attack, "jpeg|jpeg2000|none");
  sc_cal->add_option("--q", ca_q);
  sc_cal->add_option("--bpp", ca_bpp);
  sc_cal->add_option("--trials", ca_trials);
  sc_cal->add_option("--pfa", ca_pfa);
  sc_cal->add_option("--alpha", ca_alpha);
  sc_cal->add_option("--subbands", ca_subbands);
  sc_cal->add_option("--seed", ca_seed);
  sc_cal->add_option("--images", ca_images, "image files or a directory")
      ->required();
  sc_cal->add_option("--out", ca_out);

  // --- rates ---
  auto *sc_rates = app.add_subcommand("rates", "estimate p_D / p_FA");
  std::string ra_model;
  std::vector<std::string> ra_images;
  std::size_t ra_trials = 1000;
  double ra_alpha = 3.0;
  std::string ra_subbands = "ll,lh,hl,hh";
  std::uint64_t ra_seed = 42;
  unsigned ra_jobs = 1;
  sc_rates->add_option("--model", ra_model)->required();
  sc_rates->add_option("--images", ra_images)->required();
  sc_rates->add_option("--trials", ra_trials);
  sc_rates->add_option("--alpha", ra_alpha);
  sc_rates->add_option("--subbands", ra_subbands);
  sc_rates->add_option("--seed", ra_seed);
  sc_rates->add_option("--jobs", ra_jobs);

  // --- experiment ---
  auto *sc_exp = app.add_subcommand("experiment", "run the full report grid");
  std::string ex_config;
  std::string ex_outdir;
  unsigned ex_jobs = 0;
  sc_exp->add_option("--config", ex_config, "key=value config file")
      ->required();
  sc_exp->add_option("--out", ex_outdir, "override output directory");
  sc_exp->add_option("--jobs", ex_jobs, "override parallelism");

  // --- gen-fixtures ---
  auto *sc_fix = app.add_subcommand("gen-fixtures",
                                    "write the synthetic fixture images");
  std::string fx_dir = "fixtures";
  std::size_t fx_size = 128;
  sc_fix->add_option("--dir", fx_dir);
  sc_fix->add_option("--size", fx_size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sc_dump->parsed()) {
      std::cout << "wavelet,filter,taps,coefficients...,pr_residual\n";
      for (const auto &name : wm::standard_wavelet_names()) {
        wm::WaveletSpec s = wm::standard_wavelet(name);
        double res = wm::verify_perfect_reconstruction(s);
        auto print = [&](const char *which, const wm::Coeffs &c) {
          std::cout << name << "," << which << "," << c.size();
          for (double v : c) std::printf(",%.12g", v);
          std::printf(",%.3g\n", res);
        };
        print("h0", s.h0);
        print("h1", s.h1);
        print("g0", s.g0);
        print("g1", s.g1);
      }
    } else if (sc_dwt->parsed()) {
      wm::Image img = wm::read_pgm_file(dwt_in);
      wm::WaveletSpec spec = wm::standard_wavelet(dwt_wavelet);
      wm::SubbandSet s = wm::dwt2(img, spec);
      for (auto b : wm::all_subbands()) {
        const wm::Matrix &sb = wm::subband(s, b);
        std::string base = dwt_out_prefix + "_" + wm::subband_name(b);
        wm::write_pgm_file(wm::Image(wm::rescale_to_pixel_range(sb)),
                           base + ".pgm");
        write_raw_sidecar(sb, base + ".raw");
      }
      std::cout << "wrote " << dwt_out_prefix << "_{LL,LH,HL,HH}.{pgm,raw}\n";
    } else if (sc_embed->parsed()) {
      wm::Image img = wm::read_pgm_file(em_in);
      wm::SubbandMask mask = wm::parse_subband_mask(em_subbands);
      wm::Watermark w =
          wm::generate_watermark(em_seed, img.rows(), img.cols(), mask);
      wm::EmbeddingParams p{em_alpha, em_wavelet, mask};
      wm::Image out =
          wm::embed(img, w, p, wm::standard_wavelet(em_wavelet));
      wm::write_pgm_file(out, em_out);
    } else if (sc_attack->parsed()) {
      if (!at_external.empty()) {
        std::string cmd = at_external;
        auto subst = [&](const std::string &key, const std::string &val) {
          auto pos = cmd.find(key);
          if (pos != std::string::npos) cmd.replace(pos, key.size(), val);
        };
        subst("{in}", at_in);
        subst("{out}", at_out);
        int rc = std::system(cmd.c_str());
        if (rc != 0)
          throw std::runtime_error("external codec failed with status " +
                                   std::to_string(rc));
        wm::read_pgm_file(at_out); // must round-trip through PGM
      } else {
        wm::Image img = wm::read_pgm_file(at_in);
        wm::write_pgm_file(
            wm::apply_attack(img, attack_from_flags(at_kind, at_q, at_bpp)),
            at_out);
      }
    } else if (sc_detect->parsed()) {
      wm::Image orig = wm::read_pgm_file(de_orig);
      wm::Image sus = wm::read_pgm_file(de_suspect);
      wm::SubbandMask mask = wm::parse_subband_mask(de_subbands);
      wm::Watermark w =
          wm::generate_watermark(de_seed, orig.rows(), orig.cols(), mask);
      wm::EmbeddingParams p{de_alpha, de_wavelet, mask};
      wm::WaveletSpec spec = wm::standard_wavelet(de_wavelet);
      wm::EstimatedWatermark est = wm::estimate_watermark(sus, orig, p, spec);
      double rho = wm::correlation_or_zero(w, est);
      std::cout << "scope,rho\n";
      std::printf("whole,%.9f\n", rho);
      for (auto b : mask) {
        std::printf("%s,%.9f\n", wm::subband_name(b),
                    wm::correlation(w, est, b));
      }
      if (!de_model.empty()) {
        std::ifstream f(de_model);
        std::string text((std::istreambuf_iterator<char>(f)),
                         std::istreambuf_iterator<char>());
        wm::DetectorModel model = wm::model_from_csv(text);
        wm::Decision d = wm::decide(rho, model);
        std::printf("decision,%s\n",
                    d.combined == wm::Hypothesis::H1 ? "H1" : "H0");
        std::printf("decision_lr,%s\n",
                    d.by_likelihood_ratio == wm::Hypothesis::H1 ? "H1" : "H0");
        std::printf("decision_rho,%s\n",
                    d.by_rho_threshold == wm::Hypothesis::H1 ? "H1" : "H0");
        std::printf("likelihood_ratio,%.9f\n", d.likelihood_ratio);
      }
    } else if (sc_metrics->parsed()) {
      if (!me_uqi.empty()) {
        wm::Image a = wm::read_pgm_file(me_uqi[0]);
        wm::Image b = wm::read_pgm_file(me_uqi[1]);
        std::printf("uqi,%.9f\n", wm::uqi(a, b, 8, me_stride));
      }
      if (!me_jsd.empty()) {
        wm::Image img = wm::read_pgm_file(me_jsd);
        auto t = wm::jsd_table(img, wm::standard_wavelet(me_wavelet));
        const char *labels[] = {"original", "LL", "LH", "HL", "HH"};
        std::cout << "band,original,LL,LH,HL,HH\n";
        for (int i = 0; i < 5; ++i) {
          std::cout << labels[i];
          for (int j = 0; j < 5; ++j) std::printf(",%.9g", t[i][j]);
          std::cout << "\n";
        }
      }
      if (me_uqi.empty() && me_jsd.empty())
        throw std::invalid_argument("metrics: give --uqi or --jsd-table");
    } else if (sc_cal->parsed()) {
      auto images = wm::load_images(expand_images(ca_images));
      wm::CalibrationContext ctx{ca_wavelet,
                                 attack_from_flags(ca_attack, ca_q, ca_bpp),
                                 ca_alpha, wm::parse_subband_mask(ca_subbands)};
      wm::DetectorModel model =
          wm::calibrate(ctx, images, ca_trials, ca_pfa, ca_seed);
      std::ofstream f(ca_out, std::ios::trunc);
      f << wm::model_to_csv(model);
      std::printf("gamma,%.9f\nrho_threshold,%.9f\nachieved_pfa,%.6f\n",
                  model.gamma, model.rho_threshold, model.achieved_pfa);
    } else if (sc_rates->parsed()) {
      std::ifstream f(ra_model);
      if (!f) throw std::runtime_error("cannot open model " + ra_model);
      std::string text((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
      wm::DetectorModel model = wm::model_from_csv(text);
      wm::ExperimentConfig cfg;
      cfg.image_paths = expand_images(ra_images);
      cfg.evaluation_trials = ra_trials;
      cfg.alpha = ra_alpha;
      cfg.mask = wm::parse_subband_mask(ra_subbands);
      cfg.master_seed = ra_seed;
      cfg.jobs = ra_jobs;
      wm::RateEstimate r =
          wm::estimate_rates(cfg, model, wm::load_images(cfg.image_paths));
      std::cout << "metric,value,ci95_lo,ci95_hi\n";
      std::printf("p_d,%.6f,%.6f,%.6f\n", r.p_d, r.p_d_lo, r.p_d_hi);
      std::printf("p_fa,%.6f,%.6f,%.6f\n", r.p_fa, r.p_fa_lo, r.p_fa_hi);
    } else if (sc_exp->parsed()) {
      wm::ExperimentConfig cfg = wm::load_config(ex_config);
      if (!ex_outdir.empty()) cfg.output_dir = ex_outdir;
      if (ex_jobs != 0) cfg.jobs = ex_jobs;
      std::cout << wm::run_experiment(cfg);
    } else if (sc_fix->parsed()) {
      fs::create_directories(fx_dir);
      for (const auto &name : wm::fixture_names()) {
        wm::write_pgm_file(wm::make_fixture(name, fx_size),
                           (fs::path(fx_dir) / (name + ".pgm")).string());
      }
      std::cout << "wrote " << wm::fixture_names().size() << " fixtures to "
                << fx_dir << "\n";
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
