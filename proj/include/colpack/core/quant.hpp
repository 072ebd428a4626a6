// quant.hpp - power-of-two requantization helpers.
#pragma once

#include <cstdint>

namespace colpack {

// Right shift by `shift` rounding half away from zero.
constexpr std::int64_t round_shift(std::int64_t value, int shift) {
  if (shift <= 0) return value;
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  if (value >= 0) return (value + half) >> shift;
  return -((-value + half) >> shift);
}

// Smallest shift bringing |max_abs| into signed 8-bit range after rounding.
constexpr int smallest_out_shift(std::int64_t max_abs) {
  if (max_abs < 0) max_abs = -max_abs;
  int shift = 0;
  while (round_shift(max_abs, shift) > 127) ++shift;
  return shift;
}

}  // namespace colpack
