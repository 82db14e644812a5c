#include "wm/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace wm {

SubbandMask all_subbands() {
  return {Subband::LL, Subband::LH, Subband::HL, Subband::HH};
}

SubbandMask high_subbands() {
  return {Subband::LH, Subband::HL, Subband::HH};
}

SubbandMask parse_subband_mask(const std::string &csv) {
  SubbandMask mask;
  {
    std::string t;
    for (char c : csv)
      if (!std::isspace(static_cast<unsigned char>(c)))
        t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "all") return all_subbands();
    if (t == "high") return high_subbands();
  }
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::string t;
    for (char c : tok)
      if (!std::isspace(static_cast<unsigned char>(c)))
        t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "ll") mask.push_back(Subband::LL);
    else if (t == "lh") mask.push_back(Subband::LH);
    else if (t == "hl") mask.push_back(Subband::HL);
    else if (t == "hh") mask.push_back(Subband::HH);
    else if (!t.empty())
      throw std::invalid_argument("unknown subband '" + t + "'");
  }
  if (mask.empty())
    throw std::invalid_argument("subband mask must not be empty");
  return mask;
}

std::string mask_to_string(const SubbandMask &mask) {
  std::string out;
  for (Subband b : mask) {
    if (!out.empty()) out += ",";
    out += subband_name(b);
  }
  return out;
}

Watermark generate_watermark(std::uint64_t seed, std::size_t rows,
                             std::size_t cols, const SubbandMask &mask) {
  if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0)
    throw std::invalid_argument("generate_watermark: dims must be even >= 2");
  if (mask.empty())
    throw std::invalid_argument("generate_watermark: empty subband mask");
  Watermark wm;
  wm.seed = seed;
  wm.subband_mask = mask;
  SplitMix64 rng(seed);
  Matrix base(rows / 2, cols / 2);
  for (double &v : base.data()) v = rng.next_sign();
  for (Subband b : mask) {
    // The same message goes into every masked subband, with the replica's
    // sign flipped once per highpass channel.  The highpass filter's sign
    // is an arbitrary convention, and this choice makes the synthesized
    // replicas add in phase, so the pixel-domain watermark concentrates
    // where the wavelet's synthesis filters overlap constructively
    // instead of cancelling to a Nyquist pattern.
    double sign = (b == Subband::LH || b == Subband::HL) ? -1.0 : 1.0;
    Matrix m = base;
    if (sign < 0.0) m *= -1.0;
    wm.messages.push_back(std::move(m));
  }
  return wm;
}

const Matrix &Watermark::chunk(Subband b) const {
  for (std::size_t i = 0; i < subband_mask.size(); ++i)
    if (subband_mask[i] == b) return messages[i];
  throw std::invalid_argument("Watermark::chunk: subband not in mask");
}

namespace {

void check_spec(const EmbeddingParams &p, const WaveletSpec &spec,
                bool allow_zero_alpha) {
  if (p.spec_name != spec.name)
    throw std::invalid_argument("params name '" + p.spec_name +
                                "' does not match spec '" + spec.name + "'");
  if (p.alpha < 0.0 || (!allow_zero_alpha && p.alpha == 0.0))
    throw std::invalid_argument(allow_zero_alpha
                                    ? "alpha must be non-negative"
                                    : "alpha must be positive");
}

} // namespace

Image embed(const Image &img, const Watermark &wm, const EmbeddingParams &p,
            const WaveletSpec &spec) {
  // alpha = 0 is allowed here and reduces to the identity (modulo
  // transform round-trip error); estimation still requires alpha > 0.
  check_spec(p, spec, /*allow_zero_alpha=*/true);
  for (const Matrix &m : wm.messages)
    if (m.rows() != img.rows() / 2 || m.cols() != img.cols() / 2)
      throw std::invalid_argument("embed: watermark size mismatch");
  if (mask_to_string(p.subband_mask) != mask_to_string(wm.subband_mask))
    throw std::invalid_argument("embed: params mask differs from watermark mask");
  SubbandSet y = dwt2(img, spec);
  // Each masked subband carries its own chunk of the message.
  for (std::size_t k = 0; k < p.subband_mask.size(); ++k) {
    Matrix &sb = subband(y, p.subband_mask[k]);
    const Matrix &msg = wm.messages[k];
    for (std::size_t i = 0; i < sb.size(); ++i)
      sb.data()[i] += p.alpha * msg.data()[i];
  }
  return Image(idwt2_matrix(y, spec));
}

EstimatedWatermark estimate_watermark(const Image &attacked,
                                      const Image &original,
                                      const EmbeddingParams &p,
                                      const WaveletSpec &spec) {
  check_spec(p, spec, /*allow_zero_alpha=*/false);
  if (attacked.rows() != original.rows() || attacked.cols() != original.cols())
    throw std::invalid_argument("estimate_watermark: dimension mismatch");
  SubbandSet yp = dwt2(attacked, spec);
  SubbandSet x = dwt2(original, spec);
  EstimatedWatermark est;
  est.mask = p.subband_mask;
  for (Subband b : p.subband_mask) {
    Matrix d = subband(yp, b);
    d -= subband(x, b);
    d *= 1.0 / p.alpha;
    est.per_subband.push_back(std::move(d));
  }
  return est;
}

namespace {

double correlation_impl(
    const std::vector<std::pair<const Matrix *, const Matrix *>> &pairs) {
  double dot = 0.0, nw = 0.0, nwh = 0.0;
  for (const auto &[msg, e] : pairs) {
    if (!e->same_shape(*msg))
      throw std::invalid_argument("correlation: shape mismatch");
    for (std::size_t i = 0; i < msg->size(); ++i) {
      double w = msg->data()[i], wh = e->data()[i];
      dot += w * wh;
      nw += w * w;
      nwh += wh * wh;
    }
  }
  if (nwh == 0.0) throw DegenerateEstimate();
  double rho = dot / (std::sqrt(nw) * std::sqrt(nwh));
  return std::clamp(rho, -1.0, 1.0);
}

} // namespace

double correlation(const Watermark &w, const EstimatedWatermark &w_hat) {
  if (w_hat.per_subband.empty())
    throw std::invalid_argument("correlation: empty estimate");
  if (mask_to_string(w.subband_mask) != mask_to_string(w_hat.mask))
    throw std::invalid_argument("correlation: mask mismatch");
  std::vector<std::pair<const Matrix *, const Matrix *>> pairs;
  for (std::size_t i = 0; i < w_hat.per_subband.size(); ++i)
    pairs.emplace_back(&w.messages[i], &w_hat.per_subband[i]);
  return correlation_impl(pairs);
}

double correlation(const Watermark &w, const EstimatedWatermark &w_hat,
                   Subband band) {
  for (std::size_t i = 0; i < w_hat.mask.size(); ++i)
    if (w_hat.mask[i] == band)
      return correlation_impl({{&w.chunk(band), &w_hat.per_subband[i]}});
  throw std::invalid_argument("correlation: subband not in estimate mask");
}

double correlation_or_zero(const Watermark &w,
                           const EstimatedWatermark &w_hat) {
  try {
    return correlation(w, w_hat);
  } catch (const DegenerateEstimate &) {
    return 0.0;
  }
}

} // namespace wm
