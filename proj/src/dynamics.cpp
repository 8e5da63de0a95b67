#include "qpiston/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qpiston/errors.hpp"

namespace qpiston {

namespace {

constexpr double kNormTolerance = 1e-8;

double norm_of(const ComplexVector& b) {
  double s = 0.0;
  for (const auto& x : b) s += std::norm(x);
  return s;
}

// int_0^t dtau / S(tau)^2 for the affine wall.
double phase_integral(const WellGeometry& g, double t) {
  return t / (g.initial_size() * g.size(t));
}

}  // namespace

SpectralState::SpectralState(std::shared_ptr<const ModeSet> modes, ComplexVector coefficients,
                             double time, PhysicalConstants constants)
    : modes_(std::move(modes)), b_(std::move(coefficients)), time_(time), constants_(constants) {
  if (!modes_) throw std::invalid_argument("spectral state needs a mode set");
  if (b_.size() != modes_->size()) {
    throw std::invalid_argument("coefficient count " + std::to_string(b_.size()) +
                                " does not match mode count " + std::to_string(modes_->size()));
  }
  constants_.validate();
}

SpectralState SpectralState::eigenstate(std::shared_ptr<const ModeSet> modes,
                                        const ModeIndex& mode, PhysicalConstants constants,
                                        double time) {
  ComplexVector b(modes->size());
  b[modes->index_of(mode)] = 1.0;
  return {std::move(modes), std::move(b), time, constants};
}

SpectralState SpectralState::from_coefficients(
    std::shared_ptr<const ModeSet> modes,
    const std::vector<std::pair<ModeIndex, std::complex<double>>>& coefficients,
    PhysicalConstants constants, double time) {
  ComplexVector b(modes->size());
  for (const auto& [mode, value] : coefficients) b[modes->index_of(mode)] += value;
  const double n = norm_of(b);
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw DomainError("state norm " + std::to_string(n) + " differs from 1");
  }
  return {std::move(modes), std::move(b), time, constants};
}

std::complex<double> SpectralState::coefficient(const ModeIndex& mode) const {
  const auto i = modes_->find(mode);
  return i ? b_[*i] : std::complex<double>{};
}

double SpectralState::norm() const { return norm_of(b_); }

ComplexVector SpectralState::phased_coefficients() const {
  const double tau = phase_integral(geometry(), time_);
  const double scale = constants_.hbar / (2.0 * constants_.mu);
  ComplexVector c(b_.size());
  for (std::size_t i = 0; i < b_.size(); ++i) {
    const double z = (*modes_)[i].z;
    c[i] = b_[i] * std::polar(1.0, -scale * z * z * tau);
  }
  return c;
}

SpectralState SpectralState::with_geometry(const WellGeometry& geometry) const {
  auto modes = std::make_shared<const ModeSet>(modes_->with_geometry(geometry));
  return {std::move(modes), b_, time_, constants_};
}

CoefficientSystem::CoefficientSystem(const ModeSet& modes, const PhysicalConstants& constants)
    : geometry_(modes.geometry()), sectors_(modes.sectors()) {
  const Dimension d = modes.dimension();
  for (const auto& sector : sectors_) {
    const std::size_t k = sector.size();
    std::vector<double> kappa(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        const auto& a = modes[sector[i]];
        const auto& b = modes[sector[j]];
        kappa[i * k + j] = 2.0 * boundary_sign(d, a.index) * boundary_sign(d, b.index) * a.z *
                           b.z / (a.z * a.z - b.z * b.z);
      }
    }
    kappa_.push_back(std::move(kappa));
  }
  for (const auto& m : modes.modes()) {
    phase_rate_.push_back(constants.hbar * m.z * m.z / (2.0 * constants.mu));
  }
  phase_.resize(modes.size());
  work_.resize(modes.size());
}

void CoefficientSystem::operator()(double t, const ComplexVector& b, ComplexVector& dbdt) const {
  const double tau = phase_integral(geometry_, t);
  const double v_over_s = geometry_.wall_speed() / geometry_.size(t);
  for (std::size_t i = 0; i < b.size(); ++i) {
    phase_[i] = std::polar(1.0, phase_rate_[i] * tau);
    work_[i] = std::conj(phase_[i]) * b[i];
  }
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& sector = sectors_[s];
    const auto& kappa = kappa_[s];
    const std::size_t k = sector.size();
    for (std::size_t i = 0; i < k; ++i) {
      std::complex<double> acc = 0.0;
      const double* row = kappa.data() + i * k;
      for (std::size_t j = 0; j < k; ++j) acc += row[j] * work_[sector[j]];
      dbdt[sector[i]] = -v_over_s * phase_[sector[i]] * acc;
    }
  }
}

namespace {

struct Run {
  ComplexVector y;
  std::vector<double> steps;
  StepperStats stats;
};

Run integrate_to(const SpectralState& start, const std::vector<double>& stops,
                 const EvolveOptions& options, std::vector<SpectralState>* record,
                 double& max_drift) {
  CoefficientSystem system(start.modes(), start.constants());
  const RhsFunction f = [&system](double t, const ComplexVector& y, ComplexVector& dy) {
    system(t, y, dy);
  };
  Dop853 stepper(start.modes().size(), {options.rtol, options.atol, 0.0, options.max_steps});
  Run run{start.coefficients(), {}, {}};
  const double n0 = start.norm();
  double t = start.time();
  auto watch = [&](double, const ComplexVector& y) {
    max_drift = std::max(max_drift, std::abs(norm_of(y) - n0));
  };
  for (double stop : stops) {
    stepper.integrate(f, t, run.y, stop, &run.steps, watch);
    if (record) record->emplace_back(start.mode_set(), run.y, stop, start.constants());
  }
  run.stats = stepper.stats();
  return run;
}

}  // namespace

Trajectory evolve(const SpectralState& initial, double t_final, const EvolveOptions& options) {
  if (t_final < initial.time()) {
    throw DomainError("evolve runs forward in time; use rewind for earlier targets");
  }
  initial.geometry().require_positive(initial.time(), t_final);
  Trajectory out;
  out.states.push_back(initial);
  if (t_final == initial.time()) return out;

  std::vector<double> stops;
  for (double t : options.output_times) {
    if (t > initial.time() && t < t_final) stops.push_back(t);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(t_final);

  double drift = 0.0;
  const Run run = integrate_to(initial, stops, options, &out.states, drift);
  out.diagnostics.accepted_steps = run.stats.accepted;
  out.diagnostics.rejected_steps = run.stats.rejected;
  out.diagnostics.rhs_evaluations = run.stats.rhs_evaluations;
  out.diagnostics.max_norm_drift = drift;

  if (options.richardson_check) {
    CoefficientSystem system(initial.modes(), initial.constants());
    const RhsFunction f = [&system](double t, const ComplexVector& y, ComplexVector& dy) {
      system(t, y, dy);
    };
    Dop853 fixed(initial.modes().size(), {options.rtol, options.atol, 0.0, options.max_steps});
    ComplexVector y = initial.coefficients();
    double t = initial.time();
    for (double h : run.steps) {
      fixed.step(f, t, y, 0.5 * h);
      fixed.step(f, t + 0.5 * h, y, 0.5 * h);
      t += h;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - run.y[i]));
    out.diagnostics.richardson_error = err;
  }
  return out;
}

SpectralState rewind(const SpectralState& state, double t_target, const EvolveOptions& options) {
  if (t_target > state.time()) throw DomainError("rewind target lies in the future");
  state.geometry().require_positive(t_target, state.time());
  if (t_target == state.time()) return state;
  double drift = 0.0;
  EvolveOptions opts = options;
  Run run = integrate_to(state, {t_target}, opts, nullptr, drift);
  return {state.mode_set(), std::move(run.y), t_target, state.constants()};
}

SpectralState random_state(std::shared_ptr<const ModeSet> modes, std::size_t count,
                           std::mt19937_64& rng, PhysicalConstants constants) {
  if (count == 0 || count > modes->size()) {
    throw DomainError("cannot draw " + std::to_string(count) + " modes from a set of " +
                      std::to_string(modes->size()));
  }
  std::vector<std::size_t> order(modes->size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::normal_distribution<double> gauss;
  ComplexVector b(modes->size());
  double n = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    b[order[k]] = {gauss(rng), gauss(rng)};
    n += std::norm(b[order[k]]);
  }
  for (auto& x : b) x /= std::sqrt(n);
  return {std::move(modes), std::move(b), 0.0, constants};
}

double expected_energy(const SpectralState& state) {
  double e = 0.0;
  const auto& b = state.coefficients();
  for (std::size_t i = 0; i < b.size(); ++i) {
    e += std::norm(b[i]) *
         instantaneous_energy(state.constants(), state.geometry(), state.modes()[i], state.time());
  }
  return e;
}

double energy_rate(const SpectralState& state) {
  const auto& g = state.geometry();
  const auto& modes = state.modes();
  const auto c = state.phased_coefficients();
  double total = 0.0;
  for (const auto& sector : modes.sectors()) {
    std::complex<double> s = 0.0;
    for (std::size_t i : sector) s += boundary_sign(g.dimension(), modes[i].index) * modes[i].z * c[i];
    total += std::norm(s);
  }
  const double size = g.size(state.time());
  const auto& k = state.constants();
  return -k.hbar * k.hbar * g.wall_speed() / (k.mu * size * size * size) * total;
}

double energy_rate_initial(const SpectralState& state) {
  if (state.time() != 0.0) throw DomainError("initial rate requested for a state at t != 0");
  return energy_rate(state);
}

double energy_rate_from_couplings(const SpectralState& state) {
  const auto& g = state.geometry();
  const auto& modes = state.modes();
  const auto& k = state.constants();
  const double t = state.time();
  const double v_over_s = g.wall_speed() / g.size(t);
  CoefficientSystem system(modes, k);
  ComplexVector db(modes.size());
  system(t, state.coefficients(), db);
  double rate = 0.0;
  const auto& b = state.coefficients();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double e = instantaneous_energy(k, g, modes[i], t);
    const double de = -2.0 * e * v_over_s;
    rate += std::norm(b[i]) * de + e * 2.0 * std::real(std::conj(b[i]) * db[i]);
  }
  return rate;
}

}  // namespace qpiston
