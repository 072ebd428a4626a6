// random.hpp - seeded synthetic filter matrices.
#pragma once

#include <cstdint>

#include "colpack/core/matrix.hpp"

namespace colpack {

// rows x cols matrix with exactly round(density * rows * cols) nonzeros at
// uniformly random positions; values uniform over [-127, 127] \ {0}.
SparseFilterMatrix random_filter_matrix(std::size_t rows, std::size_t cols, double density,
                                        std::uint64_t seed);

}  // namespace colpack
