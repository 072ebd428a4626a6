#include "colpack/cli/energy.hpp"

#include <cmath>

#include "colpack/core/error.hpp"

namespace colpack::cli {

void EnergyParams::validate() const {
  if (!(c >= 1.0)) throw ConfigError("energy: c = n_mac / n_mac_opt must be >= 1");
  if (!(r >= 0.0)) throw ConfigError("energy: r must be >= 0");
  if (!(e_mac > 0.0) || !(n_mac_opt > 0.0)) throw ConfigError("energy: MAC energy and counts must be > 0");
  if (std::abs(n_mac - c * n_mac_opt) > 1e-9 * std::max(1.0, n_mac)) {
    throw ConfigError("energy: n_mac must equal c * n_mac_opt");
  }
}

EnergyParams energy_params(double n_mac, double n_mac_opt, double r, double e_mac) {
  if (!(n_mac_opt > 0.0)) throw ConfigError("energy: n_mac_opt must be > 0");
  EnergyParams p;
  p.e_mac = e_mac;
  p.n_mac = n_mac;
  p.n_mac_opt = n_mac_opt;
  p.c = n_mac / n_mac_opt;
  p.r = r;
  p.e_mem = r * e_mac * n_mac_opt;
  p.validate();
  return p;
}

double energy_efficiency_ratio(const EnergyParams& p) {
  p.validate();
  return (1.0 / p.c + p.r) / (1.0 + p.r);
}

MacCounts network_mac_counts(const NetworkDef& net) {
  MacCounts m;
  for (const LayerDef& layer : net.layers) {
    const double cols = static_cast<double>(layer.grouping ? layer.grouping->size()
                                                           : layer.input_channels());
    const auto pixels = static_cast<double>(layer.pixels());
    m.n_mac += static_cast<double>(layer.output_channels()) * cols * pixels;
    m.n_mac_opt += static_cast<double>(layer.weights.nnz()) * pixels;
  }
  return m;
}

}  // namespace colpack::cli
