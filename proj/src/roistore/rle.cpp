#include <algorithm>
#include <numeric>

#include "lift/common/error.hpp"
#include "lift/roistore/roistore.hpp"

namespace lift::roistore {

MaskRLE encode_mask(int x, int y, int width, int height, std::span<const std::uint8_t> pixels) {
  if (width < 0 || height < 0 || pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw_data("BadRle", "pixel buffer does not match mask dimensions");
  MaskRLE mask{x, y, width, height, {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t p : pixels) {
    const std::uint8_t bit = p ? 1 : 0;
    if (bit != current) {
      mask.counts.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  mask.counts.push_back(run);
  return mask;
}

void validate_mask(const MaskRLE& mask) {
  if (mask.width <= 0 || mask.height <= 0) throw_data("BadRle", "mask dimensions must be positive");
  const std::uint64_t total = std::accumulate(mask.counts.begin(), mask.counts.end(), std::uint64_t{0});
  if (total != static_cast<std::uint64_t>(mask.width) * static_cast<std::uint64_t>(mask.height))
    throw_data("BadRle", "runs sum to " + std::to_string(total) + ", expected " +
                             std::to_string(static_cast<std::uint64_t>(mask.width) * mask.height));
  // Only the leading zero-run may be empty; an empty run elsewhere is a
  // non-canonical encoding.
  for (std::size_t i = 1; i < mask.counts.size(); ++i)
    if (mask.counts[i] == 0) throw_data("BadRle", "empty run after position 0");
}

std::vector<std::uint8_t> decode_mask(const MaskRLE& mask) {
  validate_mask(mask);
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(mask.width) * mask.height);
  std::uint8_t bit = 0;
  for (std::uint32_t run : mask.counts) {
    pixels.insert(pixels.end(), run, bit);
    bit ^= 1;
  }
  return pixels;
}

MaskRLE rectangle_mask(int x, int y, int width, int height, int rx0, int ry0, int rx1, int ry1) {
  rx0 = std::clamp(rx0, 0, width);
  rx1 = std::clamp(rx1, 0, width);
  ry0 = std::clamp(ry0, 0, height);
  ry1 = std::clamp(ry1, 0, height);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height, 0);
  for (int r = ry0; r < ry1; ++r)
    for (int c = rx0; c < rx1; ++c) pixels[static_cast<std::size_t>(r) * width + c] = 1;
  return encode_mask(x, y, width, height, pixels);
}

std::optional<BBox> mask_extent(const MaskRLE& mask) {
  validate_mask(mask);
  int min_r = mask.height, max_r = -1, min_c = mask.width, max_c = -1;
  std::uint64_t pos = 0;
  bool on = false;
  for (std::uint32_t run : mask.counts) {
    if (on && run > 0) {
      const std::uint64_t first = pos, last = pos + run - 1;
      const int r0 = static_cast<int>(first / mask.width), r1 = static_cast<int>(last / mask.width);
      min_r = std::min(min_r, r0);
      max_r = std::max(max_r, r1);
      if (r0 == r1) {
        min_c = std::min(min_c, static_cast<int>(first % mask.width));
        max_c = std::max(max_c, static_cast<int>(last % mask.width));
      } else {
        min_c = 0;
        max_c = mask.width - 1;
      }
    }
    pos += run;
    on = !on;
  }
  if (max_r < 0) return std::nullopt;
  return BBox{static_cast<double>(mask.x + min_c), static_cast<double>(mask.y + min_r),
              static_cast<double>(mask.x + max_c + 1), static_cast<double>(mask.y + max_r + 1)};
}

}  // namespace lift::roistore
