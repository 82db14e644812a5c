#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wm/matrix.hpp"

namespace wm {

// Grayscale image with real-valued samples in nominal range [0, 255].
// Dimensions must be even (single-level 2-D DWT halves both of them).
// Quantization to 8 bits happens only at PGM serialization.
class Image {
public:
  Image(std::size_t rows, std::size_t cols) : m_(validate(rows, cols), cols) {}
  explicit Image(Matrix m);

  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }

  double &operator()(std::size_t r, std::size_t c) { return m_(r, c); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  const Matrix &matrix() const { return m_; }
  Matrix &matrix() { return m_; }

private:
  static std::size_t validate(std::size_t rows, std::size_t cols);
  Matrix m_;
};

// Binary PGM (P5), maxval <= 255, per the Netpbm convention.
Image read_pgm(const std::vector<std::uint8_t> &bytes);
Image read_pgm_file(const std::string &path);
std::vector<std::uint8_t> write_pgm(const Image &img);
void write_pgm_file(const Image &img, const std::string &path);

// Half-away-from-zero rounding followed by clamping to [0, 255].
std::uint8_t quantize_sample(double v);
// Applies quantize_sample to every pixel, result still real-valued.
Image quantize8(const Image &img);

} // namespace wm
