#include "colpack/core/network.hpp"

#include <sstream>

#include "colpack/core/error.hpp"
#include "colpack/core/shift.hpp"

namespace colpack {

std::size_t NetworkDef::nnz() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.nnz();
  return n;
}

namespace {

NetworkDiagnostic at_layer(std::size_t l, const std::string& message) {
  return NetworkDiagnostic{l, message};
}

}  // namespace

std::optional<NetworkDiagnostic> validate_network(const NetworkDef& net) {
  if (net.layers.empty()) return NetworkDiagnostic{std::nullopt, "network has no layers"};

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const LayerDef& layer = net.layers[l];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1) {
      return at_layer(l, "filter matrix must have at least one row and column");
    }
    if (layer.width < 1 || layer.height < 1) {
      return at_layer(l, "spatial dimensions must be >= 1");
    }
    if (layer.shifts.size() != layer.input_channels()) {
      std::ostringstream msg;
      msg << "shift-list length mismatch: " << layer.shifts.size()
          << " directions for " << layer.input_channels() << " input channels";
      return at_layer(l, msg.str());
    }
    for (std::uint8_t d : layer.shifts) {
      if (d >= kShiftDirectionCount) return at_layer(l, "shift direction outside 0..8");
    }
    try {
      layer.quant.validate();
    } catch (const ConfigError& e) {
      return at_layer(l, e.what());
    }
    if (layer.grouping) {
      try {
        layer.grouping->validate_partition(layer.input_channels());
      } catch (const InvariantError& e) {
        return at_layer(l, e.what());
      }
    }
    if (l + 1 < net.layers.size()) {
      const LayerDef& next = net.layers[l + 1];
      if (layer.output_channels() != next.input_channels()) {
        std::ostringstream msg;
        msg << "dimension mismatch: layer " << l << " has "
            << layer.output_channels() << " rows but layer " << l + 1
            << " expects " << next.input_channels() << " input channels";
        return at_layer(l, msg.str());
      }
      if (layer.width != next.width || layer.height != next.height) {
        return at_layer(l, "spatial dimensions change between consecutive layers");
      }
    }
  }
  return std::nullopt;
}

void require_valid(const NetworkDef& net) {
  if (auto diag = validate_network(net)) {
    std::ostringstream msg;
    msg << "invalid network";
    if (diag->layer) msg << " (layer " << *diag->layer << ")";
    msg << ": " << diag->message;
    throw ConfigError(msg.str());
  }
}

}  // namespace colpack
