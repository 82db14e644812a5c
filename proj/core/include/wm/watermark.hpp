#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wm/dwt2d.hpp"
#include "wm/image.hpp"

namespace wm {

using SubbandMask = std::vector<Subband>;

SubbandMask all_subbands();
SubbandMask high_subbands(); // LH, HL, HH
SubbandMask parse_subband_mask(const std::string &csv);
std::string mask_to_string(const SubbandMask &mask);

// splitmix64: fixed, seedable stream underlying all pseudorandom draws.
// Per-trial streams are obtained by seeding with (seed ^ trial index).
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  // +1 or -1 with equal probability.
  double next_sign() { return (next() >> 63) ? 1.0 : -1.0; }

private:
  std::uint64_t state_;
};

// Seed-deterministic +-1 message covering the masked subbands: one
// independent quarter-image chunk per masked subband, all drawn from a
// single seeded stream.  With all four subbands masked the total message
// size equals the image size.
struct Watermark {
  std::vector<Matrix> messages; // entries in {+1, -1}, (rows/2) x (cols/2),
                                // aligned with subband_mask
  std::uint64_t seed = 0;
  SubbandMask subband_mask;
  const Matrix &chunk(Subband b) const;
};

struct EmbeddingParams {
  double alpha = 3.0;
  std::string spec_name = "grs4";
  SubbandMask subband_mask = all_subbands();
};

Watermark generate_watermark(std::uint64_t seed, std::size_t rows,
                             std::size_t cols, const SubbandMask &mask);

// Y = X + alpha * W on each masked subband, then inverse transform.
// Output stays real-valued; 8-bit quantization belongs to the attack
// channel.
Image embed(const Image &img, const Watermark &wm, const EmbeddingParams &p,
            const WaveletSpec &spec);

// Per-subband estimates (Y' - X)/alpha, masked subbands only, in mask
// order.
struct EstimatedWatermark {
  std::vector<Matrix> per_subband;
  SubbandMask mask;
};

EstimatedWatermark estimate_watermark(const Image &attacked,
                                      const Image &original,
                                      const EmbeddingParams &p,
                                      const WaveletSpec &spec);

// Thrown by correlation() when the estimate carries no energy; the
// caller maps it to rho = 0 for the W = 0 null case.
struct DegenerateEstimate : std::runtime_error {
  DegenerateEstimate() : std::runtime_error("estimated watermark has zero norm") {}
};

// Cosine similarity of the stacked per-subband message chunks against
// the stacked per-subband estimates.
double correlation(const Watermark &w, const EstimatedWatermark &w_hat);
// Single-subband variant for the per-subband analysis.
double correlation(const Watermark &w, const EstimatedWatermark &w_hat,
                   Subband band);
// Like correlation() but maps a zero-energy estimate to rho = 0.
double correlation_or_zero(const Watermark &w, const EstimatedWatermark &w_hat);

} // namespace wm
