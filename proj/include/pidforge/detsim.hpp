#pragma once

// Detector stand-in: turns ground-truth graphs into noisy, scored
// prediction graphs.

#include <cstdint>
#include <string>
#include <vector>

#include "pidforge/types.hpp"

namespace pidforge::detsim {

struct NoiseConfig {
  double sigma = 0.0;      // Gaussian jitter per box corner, px
  double p_drop = 0.0;     // node drop probability
  double lambda_fp = 0.0;  // mean spurious nodes per graph
  double p_cls = 0.0;      // node class flip probability
  double p_edrop = 0.0;    // edge drop probability
  double p_eflip = 0.0;    // edge class flip probability
  double tp_conf_lo = 0.6;
  double tp_conf_hi = 1.0;
  double fp_conf_lo = 0.05;
  double fp_conf_hi = 0.6;
  std::uint64_t seed = 0;

  /// One-knob family: sigma 20L px, lambda_fp 10L, every probability 0.5L.
  /// Levels are ordered componentwise, so a higher level dominates.
  static NoiseConfig at_level(double level, std::uint64_t seed = 0);
  /// "zero" 0, "low" 0.1, "med" 0.2, "high" 0.3. Throws std::invalid_argument.
  static NoiseConfig preset(const std::string& name, std::uint64_t seed = 0);
};

void check(const NoiseConfig& cfg);  // throws std::invalid_argument

/// Drops, jitters (boxes stay inside the canvas) and class-flips nodes,
/// adds Poisson spurious nodes, then drops and flips edges between
/// survivors. Border nodes keep their class. Deterministic in cfg.seed.
ProcessGraph corrupt(const ProcessGraph& gt, const NoiseConfig& cfg);

/// corrupt() per patch with a seed derived from (cfg.seed, patch index).
std::vector<ProcessGraph> corrupt_patches(const std::vector<ProcessGraph>& patches,
                                          const NoiseConfig& cfg);

}  // namespace pidforge::detsim
