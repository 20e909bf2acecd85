#pragma once

#include <string>

#include "spdeinv/core.hpp"

namespace spdeinv {

/// Flat `key = value` config. Recognized keys:
///   a, T, M, N, u0, potential, observation_index, P, epsilon, method, mu,
///   xi_max, base_seed, sampler, threads
/// Blank lines and lines starting with '#' are ignored; unknown or repeated
/// keys are errors. Missing keys take the defaults of the Example 1 setup
/// (a = T = 1, M = 50, N = 128, u0 = gauss16, potential = example1, x_* = 0,
/// P = 10^4, epsilon = 0.1, tikhonov with mu = 0.03).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Serializes every key with 17 significant digits. `include_threads` is off
/// for result bundles so outputs do not depend on the worker count.
std::string format_config(const RunConfig& config, bool include_threads = true);

/// 17-significant-digit rendering used for every numeric output.
std::string format_number(double v);

}  // namespace spdeinv
