// shift.hpp - the nine spatial shift directions of shift convolution.
//
// Direction d encodes the offset (dy, dx) = (d / 3 - 1, d % 3 - 1); 4 is the
// identity. Shifting moves content by the offset, so out[y][x] = in[y-dy][x-dx]
// with zeros entering at the borders. Maps are laid out [channel][y][x].
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <vector>

#include "colpack/core/error.hpp"

namespace colpack {

inline constexpr std::uint8_t kShiftDirectionCount = 9;
inline constexpr std::uint8_t kIdentityShift = 4;

struct ShiftOffset {
  int dy = 0;
  int dx = 0;
};

constexpr ShiftOffset shift_offset(std::uint8_t direction) {
  return {direction / 3 - 1, direction % 3 - 1};
}

constexpr std::uint8_t opposite_shift(std::uint8_t direction) {
  return static_cast<std::uint8_t>(8 - direction);
}

// Round-robin assignment over the nine directions.
inline std::vector<std::uint8_t> round_robin_shifts(std::size_t channels) {
  std::vector<std::uint8_t> out(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    out[c] = static_cast<std::uint8_t>(c % kShiftDirectionCount);
  }
  return out;
}

// Source pixel index feeding (y, x) under `direction`, or -1 for padding.
inline std::ptrdiff_t shift_source(std::uint8_t direction, std::size_t y,
                                   std::size_t x, std::size_t height,
                                   std::size_t width) {
  const ShiftOffset off = shift_offset(direction);
  const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y) - off.dy;
  const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(x) - off.dx;
  if (sy < 0 || sx < 0 || sy >= static_cast<std::ptrdiff_t>(height) ||
      sx >= static_cast<std::ptrdiff_t>(width)) {
    return -1;
  }
  return sy * static_cast<std::ptrdiff_t>(width) + sx;
}

template <typename T>
std::vector<T> shift_maps(std::span<const T> maps, std::size_t channels,
                          std::size_t height, std::size_t width,
                          std::span<const std::uint8_t> directions) {
  const std::size_t plane = height * width;
  if (maps.size() != channels * plane) {
    throw InvariantError("shift: map size does not match channels x height x width");
  }
  if (directions.size() != channels) {
    std::ostringstream msg;
    msg << "shift: " << directions.size() << " directions for " << channels
        << " channels";
    throw ConfigError(msg.str());
  }
  std::vector<T> out(maps.size(), T{});
  for (std::size_t c = 0; c < channels; ++c) {
    if (directions[c] >= kShiftDirectionCount) {
      throw ConfigError("shift: direction out of range 0..8");
    }
    const T* in = maps.data() + c * plane;
    T* dst = out.data() + c * plane;
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const std::ptrdiff_t src = shift_source(directions[c], y, x, height, width);
        if (src >= 0) dst[y * width + x] = in[src];
      }
    }
  }
  return out;
}

}  // namespace colpack
