// network.hpp - shift + pointwise network description consumed by the
// simulator and pipeline scheduler.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"

namespace colpack {

struct LayerDef {
  SparseFilterMatrix weights;          // N x M pointwise filter matrix
  std::size_t width = 1;               // input spatial width
  std::size_t height = 1;              // input spatial height
  std::vector<std::uint8_t> shifts;    // one direction per input channel
  QuantParams quant;
  std::optional<ColumnGrouping> grouping;  // present once the layer is packed

  std::size_t input_channels() const { return weights.cols(); }
  std::size_t output_channels() const { return weights.rows(); }
  std::size_t pixels() const { return width * height; }
};

struct NetworkDef {
  std::vector<LayerDef> layers;

  std::size_t num_layers() const { return layers.size(); }
  std::size_t nnz() const;
};

struct NetworkDiagnostic {
  std::optional<std::size_t> layer;
  std::string message;
};

// First violated invariant, or nullopt when the network is well formed.
std::optional<NetworkDiagnostic> validate_network(const NetworkDef& net);

// Throws ConfigError carrying the diagnostic.
void require_valid(const NetworkDef& net);

}  // namespace colpack
