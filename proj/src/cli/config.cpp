#include "colpack/cli/config.hpp"

#include "colpack/core/error.hpp"

namespace colpack::cli {

void RunConfig::validate() const {
  packing.validate();
  if (array_rows < 1 || array_cols < 1) throw ConfigError("--array-rows/--array-cols must be >= 1");
  if (acc_bits != 16 && acc_bits != 32) throw ConfigError("--acc-bits must be 16 or 32");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("--fraction must lie in (0, 1]");
  if (rows < 1 || cols < 1) throw ConfigError("--rows/--cols must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw ConfigError("--density must lie in [0, 1]");
  if (widths.size() < 2) throw ConfigError("--widths needs at least two channel counts");
  if (sweep != "alpha" && sweep != "gamma") throw ConfigError("--sweep must be alpha or gamma");
  for (double v : values) {
    if (sweep == "alpha" && (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v)))) {
      throw ConfigError("alpha sweep values must be positive integers");
    }
    if (sweep == "gamma" && v < 0.0) throw ConfigError("gamma sweep values must be >= 0");
  }
  for (double r : memory_ratios) {
    if (r < 0.0) throw ConfigError("memory energy ratios must be >= 0");
  }
  if (images.empty() != labels.empty()) throw ConfigError("--images and --labels go together");
  if (!(eta > 0.0)) throw ConfigError("--eta must be > 0");
}

}  // namespace colpack::cli
