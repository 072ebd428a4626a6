// energy.hpp - achieved vs. optimal energy efficiency of a packed network.
//
// E_total = E_comp + E_mem with E_comp = n_mac * e_mac. With
// c = n_mac / n_mac_opt and r = E_mem / E_comp(optimal), the ratio of
// achieved to optimal energy efficiency is (1/c + r) / (1 + r).
#pragma once

#include <vector>

#include "colpack/core/network.hpp"

namespace colpack::cli {

struct EnergyParams {
  double e_mac = 1.0;
  double e_mem = 0.0;
  double n_mac = 1.0;
  double n_mac_opt = 1.0;
  double c = 1.0;
  double r = 0.0;

  // Throws ConfigError on c < 1, r < 0 or inconsistent MAC counts.
  void validate() const;
};

// Builds parameters from MAC counts; e_mem = r * e_mac * n_mac_opt.
EnergyParams energy_params(double n_mac, double n_mac_opt, double r, double e_mac = 1.0);

double energy_efficiency_ratio(const EnergyParams& p);

struct MacCounts {
  double n_mac = 0.0;      // cells occupied over time: rows x packed columns x pixels
  double n_mac_opt = 0.0;  // nonzero weights x pixels
};

// Packed layers count their combined columns, others their full width.
MacCounts network_mac_counts(const NetworkDef& net);

}  // namespace colpack::cli
