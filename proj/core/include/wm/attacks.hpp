#pragma once

#include <stdexcept>
#include <string>

#include "wm/image.hpp"

namespace wm {

enum class AttackKind { none, jpeg_like, jpeg2000_like };

struct AttackSpec {
  AttackKind kind = AttackKind::none;
  int quality = 50;     // jpeg_like, 1..100
  double bitrate = 1.0; // jpeg2000_like, bits per pixel
};

// Thrown when the deadzone step search cannot reach the requested rate.
struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic baseline-JPEG distortion model: 8-bit quantize, 8x8
// orthonormal DCT-II blocks, standard luminance table scaled by the
// conventional quality mapping, round, reconstruct, clamp.  No entropy
// coding (lossless, so irrelevant to the distortion).
Image jpeg_like_attack(const Image &img, int quality);

// Deterministic JPEG2000-class distortion model: 3-level CDF 9/7
// lifting with symmetric extension, uniform deadzone quantization with
// a single step chosen by bisection so the first-order entropy of the
// quantized coefficients matches the target rate within 0.02 bpp.
Image jpeg2000_like_attack(const Image &img, double bitrate);

Image apply_attack(const Image &img, const AttackSpec &spec);

std::string attack_to_string(const AttackSpec &spec);

} // namespace wm
