#include "wm/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wm {

double frobenius_norm(const Matrix &m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix &a, const Matrix &b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
  return mx;
}

double mean(const Matrix &m) {
  double s = 0.0;
  for (double v : m.data()) s += v;
  return s / static_cast<double>(m.size());
}

std::size_t Image::validate(std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0)
    throw std::invalid_argument(
        "Image: dimensions must be even and >= 2, got " +
        std::to_string(rows) + "x" + std::to_string(cols));
  return rows;
}

Image::Image(Matrix m) : m_(std::move(m)) {
  validate(m_.rows(), m_.cols());
  for (double v : m_.data())
    if (!std::isfinite(v))
      throw std::invalid_argument("Image: non-finite sample");
}

namespace {

struct ByteCursor {
  const std::vector<std::uint8_t> &bytes;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string &what) const {
    throw std::runtime_error("PGM parse error at byte offset " +
                             std::to_string(pos) + ": " + what);
  }

  int peek() const {
    return pos < bytes.size() ? static_cast<int>(bytes[pos]) : -1;
  }
  int get() { return pos < bytes.size() ? static_cast<int>(bytes[pos++]) : -1; }

  // Whitespace and '#' comment lines separate header tokens.
  void skip_separators() {
    for (;;) {
      int c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else if (c == '#') {
        while (peek() != '\n' && peek() != -1) ++pos;
      } else {
        return;
      }
    }
  }

  unsigned read_uint() {
    skip_separators();
    if (peek() < '0' || peek() > '9') fail("expected unsigned integer");
    unsigned long v = 0;
    while (peek() >= '0' && peek() <= '9') {
      v = v * 10 + static_cast<unsigned long>(get() - '0');
      if (v > 1u << 24) fail("integer out of range");
    }
    return static_cast<unsigned>(v);
  }
};

} // namespace

Image read_pgm(const std::vector<std::uint8_t> &bytes) {
  ByteCursor cur{bytes};
  if (cur.get() != 'P' || cur.get() != '5')
    throw std::runtime_error("PGM parse error at byte offset 0: not a P5 file");
  unsigned width = cur.read_uint();
  unsigned height = cur.read_uint();
  unsigned maxval = cur.read_uint();
  if (maxval > 255)
    throw std::runtime_error("PGM: maxval " + std::to_string(maxval) +
                             " unsupported (only 8-bit)");
  if (maxval == 0) cur.fail("maxval must be positive");
  // Exactly one whitespace byte before the raster.
  int sep = cur.get();
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
    cur.fail("expected single whitespace before raster");
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0)
    throw std::invalid_argument("PGM: dimensions must be even and >= 2, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  std::size_t need = static_cast<std::size_t>(width) * height;
  if (bytes.size() - cur.pos < need) cur.fail("truncated raster");

  Image img(height, width);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c)
      img(r, c) = static_cast<double>(bytes[cur.pos + r * width + c]);
  return img;
}

std::uint8_t quantize_sample(double v) {
  double r = v < 0.0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
  if (r < 0.0) r = 0.0;
  if (r > 255.0) r = 255.0;
  return static_cast<std::uint8_t>(r);
}

Image quantize8(const Image &img) {
  Image out(img.rows(), img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c)
      out(r, c) = static_cast<double>(quantize_sample(img(r, c)));
  return out;
}

std::vector<std::uint8_t> write_pgm(const Image &img) {
  std::string header = "P5\n" + std::to_string(img.cols()) + " " +
                       std::to_string(img.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.rows() * img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c)
      out.push_back(quantize_sample(img(r, c)));
  return out;
}

Image read_pgm_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return read_pgm(bytes);
}

void write_pgm_file(const Image &img, const std::string &path) {
  auto bytes = write_pgm(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char *>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

} // namespace wm
