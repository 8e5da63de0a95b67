#include "qpiston/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <json.hpp>

#include "qpiston/density.hpp"
#include "qpiston/errors.hpp"
#include "qpiston/grid.hpp"
#include "qpiston/output.hpp"
#include "qpiston/walllab.hpp"

namespace qpiston {

namespace {

void note(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

void require_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw std::runtime_error("output directory " + dir.string() + " does not exist");
  }
}

ValidationCheck check(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, std::isfinite(value) && std::abs(value) <= tolerance};
}

}  // namespace

bool ValidationResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

SpectralState initial_state(const ScenarioConfig& config) {
  auto modes = std::make_shared<const ModeSet>(config.geometry, config.truncation);
  return SpectralState::from_coefficients(modes, config.initial_coefficients(), config.constants);
}

std::vector<std::filesystem::path> run_fields(const ScenarioConfig& config, const RunContext& ctx) {
  require_directory(ctx.out_dir);
  for (const auto& w : config.warnings) note(ctx, "warning: " + w);
  SpectralState state = initial_state(config);
  if (config.field_time > 0.0) {
    note(ctx, "evolving to t = " + format_double(config.field_time));
    EvolveOptions opts;
    opts.rtol = config.experiment.rtol;
    opts.atol = config.experiment.atol;
    state = evolve(state, config.field_time, opts).final_state();
  }
  const double size = config.geometry.size(state.time());
  auto grid = std::make_shared<const SpatialGrid>(
      SpatialGrid::quadrature(config.geometry.dimension(), size, config.grid.points));
  note(ctx, "evaluating fields on " + std::to_string(grid->point_count()) + " points");
  const auto fields = all_fields(state, grid);
  const auto csv = ctx.out_dir / config.output.fields_csv;
  const auto meta = ctx.out_dir / config.output.fields_meta;
  write_files_atomic({{csv, fields_to_csv(fields)},
                      {meta, fields_metadata_json(state, fields, config.warnings)}});
  note(ctx, "wrote " + csv.string() + " and " + meta.string());
  return {csv, meta};
}

std::filesystem::path run_work(const ScenarioConfig& config, const RunContext& ctx) {
  require_directory(ctx.out_dir);
  for (const auto& w : config.warnings) note(ctx, "warning: " + w);
  WorkExperiment exp;
  exp.geometry = config.geometry;
  exp.constants = config.constants;
  exp.initial = config.initial_coefficients();
  exp.truncation = config.truncation;
  exp.displacement = config.experiment.displacement;
  exp.speeds = config.experiment.speeds;
  exp.scaling_displacements = config.experiment.scaling_displacements;
  exp.rtol = config.experiment.rtol;
  exp.atol = config.experiment.atol;
  note(ctx, "running " + std::to_string(exp.speeds.size()) + " speeds");
  const WallReport report = run_work_experiment(exp);

  auto modes = std::make_shared<const ModeSet>(config.geometry.with_speed(exp.speeds.front()),
                                               config.truncation);
  const auto start = SpectralState::from_coefficients(modes, exp.initial, config.constants);
  const NullityCheck nullity = rho2_wall_nullity_check(start, exp.displacement, config.grid.boundary);

  const auto path = ctx.out_dir / config.output.report;
  write_files_atomic({{path, report_to_json(report, nullity, config.warnings)}});
  note(ctx, "wrote " + path.string());
  return path;
}

ValidationResult validate_state(const SpectralState& state, const GridConfig& grid_cfg,
                                const std::string& label) {
  ValidationResult out;
  const auto& g = state.geometry();
  const Dimension d = g.dimension();
  const double size = g.size(state.time());
  auto grid = std::make_shared<const SpatialGrid>(SpatialGrid::quadrature(d, size, grid_cfg.points));
  auto wall = std::make_shared<const SpatialGrid>(SpatialGrid::boundary(d, size, grid_cfg.boundary));
  const auto fields = all_fields(state, grid);
  const double e = expected_energy(state);
  const double scale = std::max(1.0, e);
  const auto& rd = fields[static_cast<int>(FieldKind::rho_d)];
  const auto& r1 = fields[static_cast<int>(FieldKind::rho1)];
  const auto& r2 = fields[static_cast<int>(FieldKind::rho2)];
  const auto& r3 = fields[static_cast<int>(FieldKind::rho3)];

  auto add = [&](const std::string& name, double value, double tol) {
    out.checks.push_back(check(label + ": " + name, value, tol));
  };
  add("norm - 1", state.norm() - 1.0, 1e-8);
  add("int rho_d - 1", rd.integrate() - 1.0, 1e-8);
  add("(int rho2 - <E>) / max(1, <E>)", (r2.integrate() - e) / scale, 1e-8);
  add("(int rho3 - <E>) / max(1, <E>)", (r3.integrate() - e) / scale, 1e-8);
  add("int Im rho1 / max(1, <E>)", r1.integrate(1) / scale, 1e-8);
  double rho2_vs_re = 0.0, rho3_min = 0.0;
  for (std::size_t i = 0; i < grid->point_count(); ++i) {
    rho2_vs_re = std::max(rho2_vs_re, std::abs(r2.at(i) - r1.at(i, 0)));
    rho3_min = std::min(rho3_min, r3.at(i));
  }
  add("max |rho2 - Re rho1|", rho2_vs_re, 0.0);
  add("negative part of rho3", rho3_min, 0.0);
  add("max |rho2| on wall", rho2_on_boundary(state, wall).max_abs(), 1e-12);
  add("max rho_d on wall", rho_d_on_boundary(state, wall).max_abs(), 1e-12);
  const double force = wall_force(state);
  const double quad = rho3_on_boundary(state, wall).integrate();
  add("(wall force - boundary quadrature of rho3) / force", (force - quad) / force, 1e-8);
  if (g.wall_speed() != 0.0) {
    const double fv = force * g.wall_speed();
    add("(rate from couplings + F v) / |F v|", (energy_rate_from_couplings(state) + fv) / std::abs(fv), 1e-10);
  }
  const auto m = coupling_matrix(state.modes(), state.time());
  const std::size_t n = state.modes().size();
  double asym = 0.0, largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      asym = std::max(asym, std::abs(m[i * n + j] + m[j * n + i]));
      largest = std::max(largest, std::abs(m[i * n + j]));
    }
  }
  add("coupling antisymmetry (relative)", largest > 0.0 ? asym / largest : 0.0, 1e-10);
  return out;
}

ValidationResult run_validate(const ScenarioConfig& config, const RunContext& ctx) {
  require_directory(ctx.out_dir);
  for (const auto& w : config.warnings) note(ctx, "warning: " + w);
  ValidationResult all = validate_state(initial_state(config), config.grid, "configured state");
  auto modes = std::make_shared<const ModeSet>(config.geometry, config.truncation);
  std::mt19937_64 rng(ctx.seed);
  const std::size_t count = std::min<std::size_t>(config.validation.random_modes, modes->size());
  for (int k = 0; k < config.validation.random_states; ++k) {
    const auto state = random_state(modes, count, rng, config.constants);
    auto part = validate_state(state, config.grid, "random state " + std::to_string(k + 1));
    all.checks.insert(all.checks.end(), part.checks.begin(), part.checks.end());
  }

  nlohmann::ordered_json root;
  root["schema"] = kSchemaVersion;
  root["kind"] = "validation";
  root["seed"] = ctx.seed;
  root["all_pass"] = all.all_pass();
  auto list = nlohmann::ordered_json::array();
  for (const auto& c : all.checks) {
    list.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    note(ctx, std::string(c.pass ? "PASS " : "FAIL ") + c.name + " = " + format_double(c.value));
  }
  root["checks"] = list;
  root["warnings"] = config.warnings;
  write_files_atomic({{ctx.out_dir / config.output.validation, root.dump(2) + "\n"}});
  return all;
}

}  // namespace qpiston
