#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torusns/constitutive.hpp"
#include "torusns/grid.hpp"

namespace torusns {

/// Flat key-value run configuration with dotted sections. All numeric
/// fields are validated against the module preconditions before any
/// compute happens.
struct RunConfig {
  TorusGrid grid{3, 32, 2.0 / 3.0};

  LawSpec law;
  PressureSpec pressure;
  std::optional<double> lambda_bar;  // default: lambda(0) / (2 mu(0))

  // data presets
  std::string rho0_preset = "constant";  // constant | bump_with_vacuum | random_band
  double rho0_value = 1.0;
  double rho0_amplitude = 0.25;  // random_band fluctuation, must stay below the base
  int bump_power = 8;            // half-torus bump smoothness (cos^power glue)
  std::string g_preset = "zero";  // zero | single_mode | random_band
  double g_amplitude = 0.0;
  int g_wave = 1;
  int g_component = 0;
  std::string f_preset = "zero";  // zero | single_mode | ramp
  double f_amplitude = 0.0;
  int f_wave = 1;
  int f_component = 0;

  double q = 6.0;
  double T = 0.1;

  std::vector<double> delta_schedule{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5, 1e-5};
  int k_max = 12;
  double picard_tol = 1e-6;
  double dt = 1e-3;
  double cfl_safety = 0.8;
  double implicit_tol = 1e-11;
  int implicit_max_iter = 1000;
  double cauchy_tol = 1e-3;
  double blowup_threshold_factor = 1e3;

  std::string output_dir = "out";
  std::uint64_t seed = 1;
  bool checkpoints = true;

  /// Canonical one-line-per-key rendering (stable field order); hashing
  /// this ties checkpoints to the configuration that produced them.
  std::string canonical_text() const;
};

struct ParseResult {
  std::optional<RunConfig> config;  // engaged iff violations is empty
  std::vector<std::string> violations;
};

/// Parses "key = value" lines ('#' comments). Unknown keys and every
/// constraint violation are all collected, not just the first.
ParseResult parse_config(const std::string& text);

ParseResult parse_config_file(const std::string& path);

}  // namespace torusns
