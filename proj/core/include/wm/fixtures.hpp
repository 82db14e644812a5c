#pragma once

#include <string>
#include <vector>

#include "wm/image.hpp"

namespace wm {

// Synthetic test images so the suite runs without external downloads:
// gradient, checkerboard, bandnoise, blobs.
const std::vector<std::string> &fixture_names();
Image make_fixture(const std::string &name, std::size_t size = 128);
std::vector<Image> all_fixtures(std::size_t size = 128);

} // namespace wm
