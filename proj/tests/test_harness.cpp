#include <doctest.h>

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include "wm/fixtures.hpp"
#include "wm/harness.hpp"

using namespace wm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wmark_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int &counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

} // namespace

TEST_CASE("wilson95 matches hand-computed interval") {
  // p_hat = 0.8, n = 100, z = 1.96: classic textbook value
  WilsonInterval w = wilson95(80, 100);
  CHECK(w.lo == doctest::Approx(0.7112).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.8661).epsilon(1e-3));
  // degenerate counts stay inside [0, 1]
  WilsonInterval z = wilson95(0, 50);
  CHECK(z.lo == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(z.hi > 0.0);
  WilsonInterval o = wilson95(50, 50);
  CHECK(o.hi == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(o.lo < 1.0);
  CHECK_THROWS(wilson95(5, 0));
  CHECK_THROWS(wilson95(10, 5));
}

TEST_CASE("box_stats on a known sample") {
  // 1..9: median 5, quartiles 3 and 7 by midpoint interpolation
  std::vector<double> v = {9, 1, 8, 2, 7, 3, 6, 4, 5};
  BoxStats b = box_stats(v);
  CHECK(b.mean == doctest::Approx(5.0));
  CHECK(b.median == doctest::Approx(5.0));
  CHECK(b.q1 == doctest::Approx(3.0).epsilon(0.2));
  CHECK(b.q3 == doctest::Approx(7.0).epsilon(0.2));
  CHECK(b.whisker_lo >= 1.0);
  CHECK(b.whisker_hi <= 9.0);

  // an outlier is excluded from the whisker but not the mean
  std::vector<double> w = {1, 2, 3, 4, 5, 6, 7, 8, 9, 100};
  BoxStats bw = box_stats(w);
  CHECK(bw.whisker_hi < 100.0);
  CHECK(bw.mean > 10.0);
  CHECK_THROWS(box_stats({}));
}

TEST_CASE("config parsing and validation") {
  TempDir tmp;
  fs::path img = tmp.path / "img.pgm";
  write_pgm_file(make_fixture("blobs", 64), img.string());
  fs::path cfgp = tmp.path / "exp.cfg";
  {
    std::ofstream f(cfgp);
    f << "# comment line\n";
    f << "images = " << img.string() << "\n";
    f << "holdout_images = " << img.string() << "\n";
    f << "wavelets = grs4, daubechies4\n";
    f << "jpeg_qualities = 30,50\n";
    f << "jpeg2000_bitrates = 0.5\n";
    f << "alphas = 1.0, 3.0\n";
    f << "alpha = 2.5\n";
    f << "subbands = lh,hl,hh\n";
    f << "calibration_trials = 12\n";
    f << "evaluation_trials = 24\n";
    f << "seed = 7\n";
    f << "pfa = 0.02\n";
    f << "jobs = 2\n";
  }
  ExperimentConfig cfg = load_config(cfgp.string());
  CHECK(cfg.image_paths == std::vector<std::string>{img.string()});
  CHECK(cfg.wavelets == std::vector<std::string>{"grs4", "daubechies4"});
  CHECK(cfg.jpeg_qualities == std::vector<int>{30, 50});
  CHECK(cfg.jpeg2000_bitrates == std::vector<double>{0.5});
  CHECK(cfg.alpha == 2.5);
  CHECK(mask_to_string(cfg.mask) == "LH,HL,HH");
  CHECK(cfg.calibration_trials == 12);
  CHECK(cfg.evaluation_trials == 24);
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.pfa == 0.02);
  CHECK(cfg.jobs == 2);

  validate_config(cfg); // overlap allowed unless enforced
  cfg.enforce_holdout = true;
  CHECK_THROWS(validate_config(cfg));
  cfg.enforce_holdout = false;
  cfg.wavelets = {"nosuch"};
  CHECK_THROWS(validate_config(cfg));
  cfg.wavelets = {"grs4"};
  cfg.pfa = 0.0;
  CHECK_THROWS(validate_config(cfg));

  // unknown keys and bad values are reported with line numbers
  fs::path badp = tmp.path / "bad.cfg";
  {
    std::ofstream f(badp);
    f << "images = " << img.string() << "\n";
    f << "frobnicate = 1\n";
  }
  try {
    load_config(badp.string());
    FAIL("expected parse error");
  } catch (const std::exception &e) {
    std::string what = e.what();
    CHECK(what.find(":2:") != std::string::npos);
    CHECK(what.find("frobnicate") != std::string::npos);
  }
}

TEST_CASE("quality sweep is deterministic and alpha 0 means identity") {
  ExperimentConfig cfg;
  cfg.wavelets = {"grs4", "daubechies4"};
  cfg.alphas = {0.0, 1.0, 3.0};
  cfg.calibration_trials = 4;
  std::vector<Image> imgs = {make_fixture("blobs", 64)};
  auto rows = quality_sweep(cfg, imgs);
  // 2 wavelets x 2 masks (all/high) x 3 alphas
  REQUIRE(rows.size() == 12);
  for (const auto &r : rows) {
    CHECK(r.mean_uqi <= 1.0 + 1e-12);
    CHECK(r.mean_uqi >= -1.0);
  }
  // at alpha 0, quantization is the only distortion: UQI is near 1 and
  // equal across wavelets
  CHECK(rows[0].alpha == 0.0);
  CHECK(rows[0].mean_uqi > 0.99);
  CHECK(rows[0].mean_uqi == doctest::Approx(rows[6].mean_uqi).epsilon(1e-12));
  // stronger embedding never improves the index
  CHECK(rows[0].mean_uqi >= rows[1].mean_uqi);
  CHECK(rows[1].mean_uqi >= rows[2].mean_uqi);

  auto rows2 = quality_sweep(cfg, imgs);
  CHECK(quality_sweep_csv(rows) == quality_sweep_csv(rows2));
  CHECK(quality_sweep_csv(rows).find("wavelet") != std::string::npos);
}

TEST_CASE("estimate_rates separates hypotheses on an easy attack") {
  ExperimentConfig cfg;
  cfg.evaluation_trials = 60;
  cfg.calibration_trials = 60;
  cfg.alpha = 3.0;
  std::vector<Image> imgs = {make_fixture("blobs", 64),
                             make_fixture("bandnoise", 64)};
  CalibrationContext ctx;
  ctx.wavelet = "grs4";
  ctx.attack = AttackSpec{AttackKind::jpeg_like, 70};
  DetectorModel model = calibrate(ctx, imgs, 60, 0.01, 42);
  RateEstimate r = estimate_rates(cfg, model, imgs);
  CHECK(r.trials == 120); // 60 trials x 2 images
  CHECK(r.p_d > 0.9);
  CHECK(r.p_fa < 0.2);
  CHECK(r.p_d_lo <= r.p_d);
  CHECK(r.p_d <= r.p_d_hi);
  CHECK(r.p_fa_lo <= r.p_fa);
  CHECK(r.p_fa <= r.p_fa_hi);
  // multi-threaded run gives bit-identical results
  ExperimentConfig cfg2 = cfg;
  cfg2.jobs = 3;
  RateEstimate r2 = estimate_rates(cfg2, model, imgs);
  CHECK(r2.p_d == r.p_d);
  CHECK(r2.p_fa == r.p_fa);
}

TEST_CASE("subband report shape") {
  ExperimentConfig cfg;
  cfg.wavelets = {"grs4", "daubechies4"};
  cfg.calibration_trials = 8;
  std::vector<Image> imgs = {make_fixture("blobs", 64)};
  auto rows = subband_report(cfg, AttackSpec{AttackKind::jpeg_like, 50}, imgs);
  REQUIRE(rows.size() == 2 * 4);
  for (const auto &r : rows) {
    CHECK(r.samples.size() == 8);
    CHECK(r.q1 <= r.median);
    CHECK(r.median <= r.q3);
    CHECK(r.whisker_lo <= r.q1);
    CHECK(r.q3 <= r.whisker_hi);
  }
  std::string csv = subband_report_csv(rows);
  CHECK(csv.find("grs4") != std::string::npos);
  CHECK(csv.find("LL") != std::string::npos);
}

TEST_CASE("run_experiment writes a deterministic bundle") {
  TempDir tmp;
  fs::path img = tmp.path / "img.pgm";
  write_pgm_file(make_fixture("blobs", 64), img.string());

  ExperimentConfig cfg;
  cfg.image_paths = {img.string()};
  cfg.holdout_paths = {img.string()};
  cfg.wavelets = {"grs4"};
  cfg.jpeg_qualities = {50};
  cfg.jpeg2000_bitrates = {0.5};
  cfg.alphas = {3.0};
  cfg.calibration_trials = 30;
  cfg.evaluation_trials = 30;
  cfg.output_dir = (tmp.path / "out1").string();
  std::string manifest = run_experiment(cfg);
  CHECK(manifest.find("quality_sweep") != std::string::npos);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "manifest.txt"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "quality_sweep.csv"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "rates.csv"));

  cfg.output_dir = (tmp.path / "out2").string();
  run_experiment(cfg);
  for (const char *name :
       {"quality_sweep.csv", "rates.csv", "jsd_grs4.csv",
        "subband_report.csv", "calibration_summary.csv"}) {
    INFO(name);
    CHECK(slurp(tmp.path / "out1" / name) == slurp(tmp.path / "out2" / name));
  }
}
