#pragma once

// Scenario configuration: a versioned JSON document describing constants,
// geometry, initial state, truncation, grids, the work experiment and
// output file names. See README.md for the key table and defaults.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpiston/basis.hpp"
#include "qpiston/walllab.hpp"

namespace qpiston {

inline constexpr const char* kSchemaVersion = "1";

/// Malformed JSON; carries the 1-based line and column.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// Well-formed JSON that violates the schema; path names the field, e.g.
/// "geometry.dimension".
class ConfigValidationError : public std::runtime_error {
 public:
  ConfigValidationError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct StateConfig {
  std::optional<ModeIndex> eigenstate;  // set, or coefficients non-empty
  CoefficientList coefficients;

  friend bool operator==(const StateConfig&, const StateConfig&) = default;
};

struct GridConfig {
  std::array<std::size_t, 3> points{2048, 1, 1};
  std::array<std::size_t, 2> boundary{64, 32};

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ExperimentConfig {
  double displacement = 1e-4;
  std::vector<double> speeds{0.01, 0.1, 1.0};
  std::vector<double> scaling_displacements;  // empty: {1, 1/2, 1/4} x 1e-3 x size
  double rtol = 1e-10;
  double atol = 1e-12;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct OutputConfig {
  std::string fields_csv = "fields.csv";
  std::string fields_meta = "fields.json";
  std::string report = "report.json";
  std::string validation = "validation.json";

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ValidationConfig {
  int random_states = 3;
  int random_modes = 8;

  friend bool operator==(const ValidationConfig&, const ValidationConfig&) = default;
};

struct ScenarioConfig {
  PhysicalConstants constants;
  WellGeometry geometry{Dimension::segment1D, 1.0, 0.0};
  StateConfig state;
  Truncation truncation{64, 0, 0};
  GridConfig grid;
  double field_time = 0.0;
  ExperimentConfig experiment;
  OutputConfig output;
  ValidationConfig validation;
  /// Non-fatal notes collected while parsing (e.g. renormalization). Not serialized.
  std::vector<std::string> warnings;

  /// Coefficients over the configured truncation, normalized.
  CoefficientList initial_coefficients() const;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.constants == b.constants && a.geometry == b.geometry && a.state == b.state &&
           a.truncation == b.truncation && a.grid == b.grid && a.field_time == b.field_time &&
           a.experiment == b.experiment && a.output == b.output && a.validation == b.validation;
  }
};

/// Parses and validates; applies defaults; rejects unknown keys. Coefficient
/// lists whose norm is off by more than 1e-12 are renormalized with a warning.
ScenarioConfig parse_config(const std::string& text);

/// Canonical JSON text with every field written out.
std::string serialize_config(const ScenarioConfig& config);

Dimension parse_dimension(const std::string& text);

}  // namespace qpiston
