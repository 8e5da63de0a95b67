#pragma once

// Drivers behind the command-line subcommands: fields, work, validate.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpiston/config.hpp"
#include "qpiston/dynamics.hpp"

namespace qpiston {

struct RunContext {
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  std::ostream* log = nullptr;  // progress and warnings; null for quiet
};

/// The configured initial state at t = 0 over the configured truncation.
SpectralState initial_state(const ScenarioConfig& config);

/// Evaluates every field at config.field_time and writes the CSV and its
/// metadata. Returns the paths written.
std::vector<std::filesystem::path> run_fields(const ScenarioConfig& config, const RunContext& ctx);

/// Runs the work experiment and writes the report.
std::filesystem::path run_work(const ScenarioConfig& config, const RunContext& ctx);

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationResult {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
};

/// Invariant checks for one state on quadrature and boundary grids: norm,
/// integrals of rho_D, rho1, rho2, rho3, wall limits, rho3 sign, force
/// against boundary quadrature, rate identity, coupling antisymmetry.
ValidationResult validate_state(const SpectralState& state, const GridConfig& grid,
                                const std::string& label);

/// validate_state on the configured state and on seeded random states; writes
/// the result file.
ValidationResult run_validate(const ScenarioConfig& config, const RunContext& ctx);

}  // namespace qpiston
