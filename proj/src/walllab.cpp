#include "qpiston/walllab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <sstream>

#include "qpiston/density.hpp"
#include "qpiston/errors.hpp"
#include "qpiston/grid.hpp"

namespace qpiston {

namespace {

struct Job {
  double speed;
  double displacement;
  int n_max;
  bool scaling;
};

WorkCell run_cell(const WorkExperiment& exp, const Job& job) {
  Truncation trunc = exp.truncation;
  trunc.n_max = job.n_max;
  const WellGeometry g = exp.geometry.with_speed(job.speed);
  auto modes = std::make_shared<const ModeSet>(g, trunc);
  const auto start = SpectralState::from_coefficients(modes, exp.initial, exp.constants);

  WorkCell cell;
  cell.speed = job.speed;
  cell.displacement = job.displacement;
  cell.duration = job.displacement / std::abs(job.speed);
  cell.n_max = job.n_max;

  EvolveOptions opts;
  opts.rtol = exp.rtol;
  opts.atol = exp.atol;
  opts.max_steps = exp.max_steps;
  opts.richardson_check = false;
  const auto traj = evolve(start, cell.duration, opts);

  const double force = wall_force(start);
  cell.measured_work = expected_energy(traj.final_state()) - expected_energy(start);
  cell.predicted_work = -force * job.speed * cell.duration;
  cell.analytic_work = energy_rate_initial(start) * cell.duration;
  cell.rel_measured_vs_predicted =
      relative_difference(cell.measured_work, cell.predicted_work, cell.measured_work);
  cell.rel_measured_vs_analytic =
      relative_difference(cell.measured_work, cell.analytic_work, cell.measured_work);
  cell.rel_predicted_vs_analytic =
      relative_difference(cell.predicted_work, cell.analytic_work, cell.measured_work);
  cell.steps = traj.diagnostics.accepted_steps;
  cell.norm_drift = traj.diagnostics.max_norm_drift;
  return cell;
}

}  // namespace

void WorkExperiment::validate() const {
  constants.validate();
  if (truncation.n_max < 1) throw DomainError("truncation n_max must be at least 1");
  if (initial.empty()) throw DomainError("work experiment needs an initial state");
  double norm = 0.0;
  for (const auto& entry : initial) norm += std::norm(entry.second);
  if (std::abs(norm - 1.0) > 1e-8) throw DomainError("initial state is not normalized");
  if (!(rtol > 0.0) || !(atol >= 0.0)) throw DomainError("tolerances must be positive");
  const double limit = 1e-3 * geometry.initial_size();
  auto check_travel = [&](double dl) {
    if (!(dl >= 0.0) || dl > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "displacement " << dl << " must lie in [0, 1e-3 x size = " << limit << "]";
      throw DomainError(os.str());
    }
  };
  check_travel(displacement);
  for (double dl : scaling_displacements) check_travel(dl);
  if (speeds.empty()) throw DomainError("work experiment needs at least one speed");
  for (double v : speeds) {
    if (!(v != 0.0) || !std::isfinite(v)) throw DomainError("wall speeds must be finite and nonzero");
  }
}

const WorkCell& WallReport::cell(double speed, int n_max) const {
  for (const auto& c : cells) {
    if (c.speed == speed && c.n_max == n_max) return c;
  }
  throw std::out_of_range("no work cell for the requested speed and truncation");
}

double relative_difference(double a, double b, double reference) {
  const double diff = std::abs(a - b);
  if (diff == 0.0) return 0.0;
  return diff / std::abs(reference);
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

WallReport run_work_experiment(const WorkExperiment& exp) {
  exp.validate();
  std::vector<double> scaling = exp.scaling_displacements;
  if (scaling.empty()) {
    const double s = exp.geometry.initial_size();
    scaling = {1e-3 * s, 5e-4 * s, 2.5e-4 * s};
  }

  std::vector<Job> jobs;
  for (double v : exp.speeds) {
    jobs.push_back({v, exp.displacement, exp.truncation.n_max, false});
    jobs.push_back({v, exp.displacement, 2 * exp.truncation.n_max, false});
    for (double dl : scaling) jobs.push_back({v, dl, exp.truncation.n_max, true});
  }

  std::vector<WorkCell> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      results[i] = run_cell(exp, jobs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    std::ostringstream os;
    os << "work experiment failed at speed " << jobs[i].speed << ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      os << e.what();
    }
    throw ExperimentError(os.str(), jobs[i].speed);
  }

  WallReport report;
  report.geometry = exp.geometry.with_speed(exp.speeds.front());
  report.constants = exp.constants;
  report.initial = exp.initial;
  report.truncation = exp.truncation;
  {
    auto modes = std::make_shared<const ModeSet>(report.geometry, exp.truncation);
    const auto start = SpectralState::from_coefficients(modes, exp.initial, exp.constants);
    report.force = wall_force(start);
    report.area = report.geometry.boundary_area(0.0);
    report.pressure = report.force / report.area;
    report.rate_per_speed = energy_rate_initial(start) / report.geometry.wall_speed();
  }

  for (double v : exp.speeds) {
    ScalingStudy study;
    study.speed = v;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].speed != v) continue;
      if (jobs[i].scaling) {
        study.displacements.push_back(results[i].displacement);
        study.discrepancies.push_back(std::abs(results[i].measured_work - results[i].predicted_work));
      } else {
        report.cells.push_back(results[i]);
      }
    }
    study.fitted_order = fitted_order(study.displacements, study.discrepancies);
    report.scaling.push_back(std::move(study));
  }

  const int base = exp.truncation.n_max;
  for (double a : exp.speeds) {
    const auto& ca = report.cell(a, base);
    const auto& cd = report.cell(a, 2 * base);
    report.truncation_change = std::max(
        report.truncation_change,
        relative_difference(ca.measured_work, cd.measured_work, cd.measured_work));
    for (double b : exp.speeds) {
      const auto& cb = report.cell(b, base);
      const double ref = std::min(std::abs(ca.measured_work), std::abs(cb.measured_work));
      report.speed_spread =
          std::max(report.speed_spread, relative_difference(ca.measured_work, cb.measured_work, ref));
    }
  }
  return report;
}

AdiabaticCheck adiabatic_crosscheck(const WellGeometry& geometry, const ModeIndex& mode,
                                    const PhysicalConstants& constants) {
  auto modes = std::make_shared<const ModeSet>(ModeSet::from_modes(geometry, {mode}));
  const auto state = SpectralState::eigenstate(modes, mode, constants);
  AdiabaticCheck out;
  out.force = wall_force(state);
  const auto& m = (*modes)[0];
  const double s = geometry.initial_size();
  const double h2mu = constants.hbar * constants.hbar / constants.mu;
  // E = hbar^2 z^2 / (2 mu S^2)
  out.energy_slope = -h2mu * m.z * m.z / (s * s * s);
  const double ds = 1e-5 * s;
  auto energy_at = [&](double size) {
    return instantaneous_energy(constants, WellGeometry(geometry.dimension(), size, 0.0), m, 0.0);
  };
  out.energy_slope_numeric = (energy_at(s + ds) - energy_at(s - ds)) / (2.0 * ds);
  out.relative_residual = std::abs(out.force + out.energy_slope) / out.force;
  return out;
}

NullityCheck rho2_wall_nullity_check(const SpectralState& state, double displacement,
                                     std::array<std::size_t, 2> boundary_counts) {
  const auto& g = state.geometry();
  const double v = g.wall_speed();
  if (v == 0.0) throw DomainError("the nullity check needs a moving wall");
  const double t = state.time();
  auto boundary = std::make_shared<const SpatialGrid>(
      SpatialGrid::boundary(g.dimension(), g.size(t), boundary_counts));
  const auto r2 = rho2_on_boundary(state, boundary);
  const auto rd = rho_d_on_boundary(state, boundary);

  NullityCheck out;
  out.rho2_wall_max = r2.max_abs();
  out.rho_d_wall_max = rd.max_abs();
  out.rho3_wall_force = wall_force(state);
  const double travel = std::copysign(displacement, v);
  out.rho2_predicted_work = -r2.integrate() * travel + 0.0;
  out.rho3_predicted_work = -out.rho3_wall_force * travel;

  EvolveOptions opts;
  opts.richardson_check = false;
  const auto traj = evolve(state, t + displacement / std::abs(v), opts);
  out.measured_work = expected_energy(traj.final_state()) - expected_energy(state);
  return out;
}

}  // namespace qpiston
