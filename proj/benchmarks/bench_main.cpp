#include <benchmark/benchmark.h>

#include "wm/attacks.hpp"
#include "wm/detector.hpp"
#include "wm/dwt2d.hpp"
#include "wm/fixtures.hpp"
#include "wm/metrics.hpp"
#include "wm/watermark.hpp"

namespace {

const wm::Image &bench_image() {
  static const wm::Image img = wm::make_fixture("blobs", 128);
  return img;
}

void BM_Dwt2(benchmark::State &state) {
  wm::WaveletSpec spec = wm::standard_wavelet("grs4");
  for (auto _ : state) {
    auto s = wm::dwt2(bench_image(), spec);
    benchmark::DoNotOptimize(s.ll.data().data());
  }
}
BENCHMARK(BM_Dwt2);

void BM_EmbedEstimate(benchmark::State &state) {
  wm::WaveletSpec spec = wm::standard_wavelet("grs4");
  wm::EmbeddingParams p{3.0, "grs4", wm::all_subbands()};
  wm::Watermark w = wm::generate_watermark(7, 128, 128, p.subband_mask);
  for (auto _ : state) {
    wm::Image marked = wm::embed(bench_image(), w, p, spec);
    auto est = wm::estimate_watermark(marked, bench_image(), p, spec);
    benchmark::DoNotOptimize(wm::correlation(w, est));
  }
}
BENCHMARK(BM_EmbedEstimate);

void BM_JpegAttack(benchmark::State &state) {
  for (auto _ : state) {
    wm::Image a = wm::jpeg_like_attack(bench_image(), 10);
    benchmark::DoNotOptimize(a.matrix().data().data());
  }
}
BENCHMARK(BM_JpegAttack);

void BM_Jpeg2000Attack(benchmark::State &state) {
  for (auto _ : state) {
    wm::Image a = wm::jpeg2000_like_attack(bench_image(), 0.25);
    benchmark::DoNotOptimize(a.matrix().data().data());
  }
}
BENCHMARK(BM_Jpeg2000Attack);

void BM_Uqi(benchmark::State &state) {
  wm::Image b = wm::jpeg_like_attack(bench_image(), 50);
  for (auto _ : state) benchmark::DoNotOptimize(wm::uqi(bench_image(), b));
}
BENCHMARK(BM_Uqi);

void BM_Kde(benchmark::State &state) {
  wm::SplitMix64 rng(3);
  std::vector<double> samples(2000);
  for (double &v : samples) v = 0.2 * (rng.next_double() - 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(wm::build_empirical_pdf(samples).density.data());
}
BENCHMARK(BM_Kde);

} // namespace

BENCHMARK_MAIN();
