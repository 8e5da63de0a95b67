#pragma once

// Serialization of fields and reports, and all-or-nothing file writes.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qpiston/density.hpp"
#include "qpiston/walllab.hpp"

namespace qpiston {

/// Shortest decimal text that reads back to the same double; "nan"/"inf" spelled out.
std::string format_double(double x);

/// Writes every file to a temporary sibling first and renames them into place
/// only when all writes succeeded. On failure nothing is left behind.
void write_files_atomic(const std::vector<std::pair<std::filesystem::path, std::string>>& files);

/// CSV column names: coordinates, then rho_d, rho1_re, rho1_im, rho2, rho3 and
/// the flux2 / flux3 components. In 1D: x,rho_d,rho1_re,rho1_im,rho2,rho3,flux2,flux3.
std::vector<std::string> field_columns(Dimension d);

/// One row per grid point, from the fields returned by all_fields.
std::string fields_to_csv(const std::vector<DensityField>& fields);

/// Metadata sidecar for a field dump: schema, geometry, state, grid and
/// integral checks.
std::string fields_metadata_json(const SpectralState& state, const std::vector<DensityField>& fields,
                                 const std::vector<std::string>& warnings);

/// The work report with top-level keys schema, geometry, state, predicted_work,
/// measured_work, analytic_rate, force, pressure, discrepancies, convergence,
/// plus the wall nullity comparison and warnings.
std::string report_to_json(const WallReport& report, const NullityCheck& nullity,
                           const std::vector<std::string>& warnings);

}  // namespace qpiston
