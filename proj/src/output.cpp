#include "qpiston/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

#include "qpiston/config.hpp"

namespace qpiston {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json geometry_json(const WellGeometry& g) {
  return {{"dimension", to_string(g.dimension())},
          {"size", g.initial_size()},
          {"speed", g.wall_speed()}};
}

Json coefficients_json(const CoefficientList& list, Dimension d) {
  Json out = Json::array();
  for (const auto& [m, b] : list) {
    out.push_back({{"mode", to_string(m, d)}, {"n", m.n}, {"l", m.l}, {"m", m.m},
                   {"re", b.real()}, {"im", b.imag()}});
  }
  return out;
}

std::filesystem::path temp_sibling(const std::filesystem::path& target, std::mt19937_64& rng) {
  const auto tag = std::to_string(rng() % 1000000007ULL);
  return target.parent_path() / ("." + target.filename().string() + ".tmp" + tag);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_files_atomic(const std::vector<std::pair<std::filesystem::path, std::string>>& files) {
  std::mt19937_64 rng(std::random_device{}());
  std::vector<std::filesystem::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) std::filesystem::remove(t, ec);
  };
  for (const auto& [target, content] : files) {
    const auto tmp = temp_sibling(target, rng);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw std::runtime_error("cannot write " + target.string());
    }
    temps.push_back(tmp);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw std::runtime_error("write to " + target.string() + " failed");
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    std::filesystem::rename(temps[i], files[i].first, ec);
    if (ec) {
      // undo the renames already made so the set stays all-or-nothing
      for (std::size_t j = 0; j < i; ++j) std::filesystem::remove(files[j].first, ec);
      cleanup();
      throw std::runtime_error("cannot move output into " + files[i].first.string());
    }
  }
}

std::vector<std::string> field_columns(Dimension d) {
  switch (d) {
    case Dimension::segment1D:
      return {"x", "rho_d", "rho1_re", "rho1_im", "rho2", "rho3", "flux2", "flux3"};
    case Dimension::disk2D:
      return {"r", "phi", "rho_d", "rho1_re", "rho1_im", "rho2", "rho3",
              "flux2_r", "flux2_phi", "flux3_r", "flux3_phi"};
    case Dimension::sphere3D:
      return {"r", "theta", "phi", "rho_d", "rho1_re", "rho1_im", "rho2", "rho3",
              "flux2_r", "flux2_theta", "flux2_phi", "flux3_r", "flux3_theta", "flux3_phi"};
  }
  return {};
}

std::string fields_to_csv(const std::vector<DensityField>& fields) {
  if (fields.size() != 7) throw std::invalid_argument("expected the seven fields of all_fields");
  const auto& grid = fields.front().grid();
  const Dimension d = grid.dimension();
  const std::size_t dims = static_cast<std::size_t>(rank(d));
  const auto& rd = fields[static_cast<int>(FieldKind::rho_d)];
  const auto& r1 = fields[static_cast<int>(FieldKind::rho1)];
  const auto& r2 = fields[static_cast<int>(FieldKind::rho2)];
  const auto& r3 = fields[static_cast<int>(FieldKind::rho3)];
  const auto& f2 = fields[static_cast<int>(FieldKind::flux2)];
  const auto& f3 = fields[static_cast<int>(FieldKind::flux3)];

  std::string out;
  const auto cols = field_columns(d);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += cols[i];
    out += i + 1 < cols.size() ? ',' : '\n';
  }
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const Point x = grid.point(p);
    std::string row;
    for (std::size_t k = 0; k < dims; ++k) row += format_double(x[k]) + ",";
    row += format_double(rd.at(p)) + ",";
    row += format_double(r1.at(p, 0)) + ",";
    row += format_double(r1.at(p, 1)) + ",";
    row += format_double(r2.at(p)) + ",";
    row += format_double(r3.at(p));
    for (std::size_t k = 0; k < dims; ++k) row += "," + format_double(f2.at(p, k));
    for (std::size_t k = 0; k < dims; ++k) row += "," + format_double(f3.at(p, k));
    out += row;
    out += '\n';
  }
  return out;
}

std::string fields_metadata_json(const SpectralState& state, const std::vector<DensityField>& fields,
                                 const std::vector<std::string>& warnings) {
  const auto& grid = fields.front().grid();
  Json root;
  root["schema"] = kSchemaVersion;
  root["kind"] = "fields";
  root["geometry"] = geometry_json(state.geometry());
  root["time"] = state.time();
  root["size_at_time"] = grid.size();
  CoefficientList list;
  for (std::size_t i = 0; i < state.modes().size(); ++i) {
    if (state.coefficients()[i] != 0.0) list.emplace_back(state.modes()[i].index, state.coefficients()[i]);
  }
  root["state"] = {{"constants", {{"hbar", state.constants().hbar}, {"mu", state.constants().mu}}},
                   {"coefficients", coefficients_json(list, state.geometry().dimension())}};
  Json axes = Json::array();
  for (const auto& ax : grid.axes()) axes.push_back(ax.size());
  root["grid"] = {{"shape", axes}, {"points", grid.point_count()}};
  root["columns"] = field_columns(grid.dimension());
  root["frame"] = grid.dimension() == Dimension::segment1D
                      ? "x"
                      : (grid.dimension() == Dimension::disk2D ? "r, phi unit vectors"
                                                               : "r, theta, phi unit vectors");
  root["expected_energy"] = expected_energy(state);
  root["integrals"] = {
      {"rho_d", fields[static_cast<int>(FieldKind::rho_d)].integrate()},
      {"rho1_re", fields[static_cast<int>(FieldKind::rho1)].integrate(0)},
      {"rho1_im", fields[static_cast<int>(FieldKind::rho1)].integrate(1)},
      {"rho2", fields[static_cast<int>(FieldKind::rho2)].integrate()},
      {"rho3", fields[static_cast<int>(FieldKind::rho3)].integrate()}};
  root["warnings"] = warnings;
  return root.dump(2) + "\n";
}

std::string report_to_json(const WallReport& report, const NullityCheck& nullity,
                           const std::vector<std::string>& warnings) {
  const Dimension d = report.geometry.dimension();
  Json root;
  root["schema"] = kSchemaVersion;
  root["kind"] = "work_report";
  root["geometry"] = geometry_json(report.geometry);
  root["state"] = {{"constants", {{"hbar", report.constants.hbar}, {"mu", report.constants.mu}}},
                   {"coefficients", coefficients_json(report.initial, d)},
                   {"truncation", {{"n_max", report.truncation.n_max},
                                   {"m_max", report.truncation.m_max},
                                   {"l_max", report.truncation.l_max}}}};

  const double dl = report.cells.empty() ? 0.0 : report.cells.front().displacement;
  Json predicted = Json::array();
  Json measured = Json::array();
  Json rates = Json::array();
  Json disc = Json::array();
  for (const auto& c : report.cells) {
    predicted.push_back({{"speed", c.speed}, {"n_max", c.n_max}, {"rho3", c.predicted_work},
                         {"analytic", c.analytic_work}});
    measured.push_back({{"speed", c.speed}, {"n_max", c.n_max}, {"displacement", c.displacement},
                        {"duration", c.duration}, {"work", c.measured_work}, {"steps", c.steps},
                        {"norm_drift", c.norm_drift}});
    if (c.n_max == report.truncation.n_max) {
      rates.push_back({{"speed", c.speed}, {"rate", report.rate_per_speed * c.speed}});
    }
    disc.push_back({{"speed", c.speed}, {"n_max", c.n_max},
                    {"measured_vs_predicted", c.rel_measured_vs_predicted},
                    {"measured_vs_analytic", c.rel_measured_vs_analytic},
                    {"predicted_vs_analytic", c.rel_predicted_vs_analytic}});
  }
  root["predicted_work"] = {{"displacement", dl},
                            {"rho3", -report.force * dl},
                            {"rho2", nullity.rho2_predicted_work},
                            {"cells", predicted}};
  root["measured_work"] = measured;
  root["analytic_rate"] = {{"per_unit_speed", report.rate_per_speed}, {"by_speed", rates}};
  root["force"] = report.force;
  root["pressure"] = {{"value", report.pressure}, {"area", report.area}};
  root["discrepancies"] = {{"definition", "relative to |measured work|"},
                           {"cells", disc},
                           {"speed_spread", report.speed_spread}};
  Json scaling = Json::array();
  for (const auto& s : report.scaling) {
    scaling.push_back({{"speed", s.speed}, {"displacements", s.displacements},
                       {"discrepancies", s.discrepancies},
                       {"fitted_order", number_or_null(s.fitted_order)}});
  }
  root["convergence"] = {{"truncations", {report.truncation.n_max, 2 * report.truncation.n_max}},
                         {"max_relative_change", report.truncation_change},
                         {"displacement_order", scaling}};
  root["wall_nullity"] = {{"rho2_wall_max", nullity.rho2_wall_max},
                          {"rho_d_wall_max", nullity.rho_d_wall_max},
                          {"measured_work", nullity.measured_work},
                          {"rho2_predicted_work", nullity.rho2_predicted_work},
                          {"rho3_predicted_work", nullity.rho3_predicted_work}};
  root["warnings"] = warnings;
  return root.dump(2) + "\n";
}

}  // namespace qpiston
