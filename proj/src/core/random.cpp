#include "colpack/core/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "colpack/core/error.hpp"

namespace colpack {

SparseFilterMatrix random_filter_matrix(std::size_t rows, std::size_t cols, double density,
                                        std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ConfigError("random matrix: dimensions must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw ConfigError("random matrix: density outside [0, 1]");
  const std::size_t total = rows * cols;
  const auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(total)));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> positions(total);
  std::iota(positions.begin(), positions.end(), 0);
  std::shuffle(positions.begin(), positions.end(), rng);
  std::uniform_int_distribution<int> mag(1, 127);
  std::bernoulli_distribution negative(0.5);
  SparseFilterMatrix m(rows, cols);
  for (std::size_t i = 0; i < count; ++i) {
    const int v = mag(rng);
    m.values()[positions[i]] = static_cast<std::int8_t>(negative(rng) ? -v : v);
  }
  return m;
}

}  // namespace colpack
