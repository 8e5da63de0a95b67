#include "qpiston/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qpiston/errors.hpp"

namespace qpiston {

namespace {

using Json = nlohmann::ordered_json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigValidationError(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigValidationError(join(path, key), "unknown key");
  }
}

double number(const Json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigValidationError(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigValidationError(join(path, key), "expected a finite number");
  return x;
}

long integer(const Json& obj, const std::string& path, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigValidationError(join(path, key), "expected an integer");
  return v.get<long>();
}

std::string text(const Json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigValidationError(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& obj, const std::string& path, const char* key,
                            const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigValidationError(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigValidationError(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

template <std::size_t N>
std::array<std::size_t, N> counts(const Json& obj, const std::string& path, const char* key,
                                  std::array<std::size_t, N> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const std::string p = join(path, key);
  if (!v.is_array() || v.size() != N) {
    throw ConfigValidationError(p, "expected an array of " + std::to_string(N) + " positive integers");
  }
  std::array<std::size_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number_integer() || v[i].get<long>() < 1) {
      throw ConfigValidationError(p + "[" + std::to_string(i) + "]", "expected a positive integer");
    }
    out[i] = v[i].get<std::size_t>();
  }
  return out;
}

ModeIndex mode_from(const Json& obj, const std::string& path, Dimension d, bool with_amplitude) {
  if (with_amplitude) {
    only_keys(obj, path, {"n", "l", "m", "re", "im"});
  } else {
    only_keys(obj, path, {"n", "l", "m"});
  }
  ModeIndex mode;
  mode.n = static_cast<int>(integer(obj, path, "n", 1));
  mode.l = static_cast<int>(integer(obj, path, "l", 0));
  mode.m = static_cast<int>(integer(obj, path, "m", 0));
  if (!mode.valid_for(d)) {
    throw ConfigValidationError(path, "mode " + to_string(mode, d) + " is not valid for " + to_string(d));
  }
  return mode;
}

void check_in_truncation(const ModeIndex& mode, const Truncation& t, Dimension d, const std::string& path) {
  bool inside = mode.n <= t.n_max;
  if (d == Dimension::disk2D) inside = inside && std::abs(mode.m) <= t.m_max;
  if (d == Dimension::sphere3D) inside = inside && mode.l <= t.l_max;
  if (!inside) throw ConfigValidationError(path, "mode " + to_string(mode, d) + " lies outside the truncation");
}

Json mode_json(const ModeIndex& m) { return Json{{"n", m.n}, {"l", m.l}, {"m", m.m}}; }

}  // namespace

Dimension parse_dimension(const std::string& s) {
  if (s == "1D") return Dimension::segment1D;
  if (s == "2D") return Dimension::disk2D;
  if (s == "3D") return Dimension::sphere3D;
  throw ConfigValidationError("geometry.dimension", "expected \"1D\", \"2D\" or \"3D\", got \"" + s + "\"");
}

CoefficientList ScenarioConfig::initial_coefficients() const {
  if (state.eigenstate) return {{*state.eigenstate, 1.0}};
  return state.coefficients;
}

ScenarioConfig parse_config(const std::string& source) {
  Json root;
  try {
    root = Json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line and column
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, source.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (source[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << "config parse error at line " << line << ", column " << column << ": " << e.what();
    throw ConfigParseError(os.str(), line, column);
  }

  only_keys(root, "", {"schema", "constants", "geometry", "state", "truncation", "grid", "fields",
                       "experiment", "output", "validation"});
  ScenarioConfig cfg;
  const std::string schema = text(root, "", "schema", kSchemaVersion);
  if (schema != kSchemaVersion) throw ConfigValidationError("schema", "unsupported schema version \"" + schema + "\"");

  const Json empty = Json::object();
  auto section = [&](const char* key) -> const Json& { return root.contains(key) ? root.at(key) : empty; };

  {
    const auto& c = section("constants");
    only_keys(c, "constants", {"hbar", "mu"});
    cfg.constants.hbar = number(c, "constants", "hbar", 1.0);
    cfg.constants.mu = number(c, "constants", "mu", 1.0);
    if (!(cfg.constants.hbar > 0.0)) throw ConfigValidationError("constants.hbar", "must be positive");
    if (!(cfg.constants.mu > 0.0)) throw ConfigValidationError("constants.mu", "must be positive");
  }
  {
    if (!root.contains("geometry")) throw ConfigValidationError("geometry", "required section missing");
    const auto& g = root.at("geometry");
    only_keys(g, "geometry", {"dimension", "size", "speed"});
    if (!g.contains("dimension")) throw ConfigValidationError("geometry.dimension", "required");
    const Dimension d = parse_dimension(text(g, "geometry", "dimension", ""));
    const double size = number(g, "geometry", "size", 1.0);
    if (!(size > 0.0)) throw ConfigValidationError("geometry.size", "must be positive");
    cfg.geometry = WellGeometry(d, size, number(g, "geometry", "speed", 0.0));
  }
  const Dimension d = cfg.geometry.dimension();
  {
    const auto& t = section("truncation");
    only_keys(t, "truncation", {"n_max", "m_max", "l_max"});
    cfg.truncation.n_max = static_cast<int>(integer(t, "truncation", "n_max", 64));
    cfg.truncation.m_max = static_cast<int>(integer(t, "truncation", "m_max", 0));
    cfg.truncation.l_max = static_cast<int>(integer(t, "truncation", "l_max", 0));
    if (cfg.truncation.n_max < 1) throw ConfigValidationError("truncation.n_max", "must be at least 1");
    if (cfg.truncation.m_max < 0) throw ConfigValidationError("truncation.m_max", "must be non-negative");
    if (cfg.truncation.l_max < 0) throw ConfigValidationError("truncation.l_max", "must be non-negative");
  }
  {
    if (!root.contains("state")) throw ConfigValidationError("state", "required section missing");
    const auto& s = root.at("state");
    only_keys(s, "state", {"eigenstate", "coefficients"});
    if (s.contains("eigenstate") == s.contains("coefficients")) {
      throw ConfigValidationError("state", "give exactly one of \"eigenstate\" or \"coefficients\"");
    }
    if (s.contains("eigenstate")) {
      const ModeIndex m = mode_from(s.at("eigenstate"), "state.eigenstate", d, false);
      check_in_truncation(m, cfg.truncation, d, "state.eigenstate");
      cfg.state.eigenstate = m;
    } else {
      const auto& list = s.at("coefficients");
      if (!list.is_array() || list.empty()) {
        throw ConfigValidationError("state.coefficients", "expected a non-empty array");
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = "state.coefficients[" + std::to_string(i) + "]";
        const ModeIndex m = mode_from(list[i], p, d, true);
        check_in_truncation(m, cfg.truncation, d, p);
        for (const auto& [other, value] : cfg.state.coefficients) {
          if (other == m) throw ConfigValidationError(p, "duplicate mode " + to_string(m, d));
        }
        const std::complex<double> b(number(list[i], p, "re", 0.0), number(list[i], p, "im", 0.0));
        norm += std::norm(b);
        cfg.state.coefficients.emplace_back(m, b);
      }
      if (!(norm > 0.0)) throw ConfigValidationError("state.coefficients", "all coefficients are zero");
      if (std::abs(norm - 1.0) > 1e-12) {
        const double scale = 1.0 / std::sqrt(norm);
        for (auto& entry : cfg.state.coefficients) entry.second *= scale;
        std::ostringstream os;
        os.precision(17);
        os << "state.coefficients: norm " << norm << " renormalized to 1";
        cfg.warnings.push_back(os.str());
      }
    }
  }
  {
    const auto& g = section("grid");
    only_keys(g, "grid", {"points", "boundary"});
    std::array<std::size_t, 3> fallback{2048, 1, 1};
    if (d == Dimension::disk2D) fallback = {256, 128, 1};
    if (d == Dimension::sphere3D) fallback = {128, 64, 32};
    cfg.grid.points = counts<3>(g, "grid", "points", fallback);
    cfg.grid.boundary = counts<2>(g, "grid", "boundary", {64, 32});
  }
  {
    const auto& f = section("fields");
    only_keys(f, "fields", {"time"});
    cfg.field_time = number(f, "fields", "time", 0.0);
    if (cfg.field_time < 0.0) throw ConfigValidationError("fields.time", "must be non-negative");
    if (!(cfg.geometry.size(cfg.field_time) > 0.0)) {
      throw ConfigValidationError("fields.time", "the well has collapsed by this time");
    }
  }
  {
    const auto& e = section("experiment");
    only_keys(e, "experiment", {"displacement", "speeds", "scaling_displacements", "rtol", "atol"});
    auto& x = cfg.experiment;
    x.displacement = number(e, "experiment", "displacement", x.displacement);
    x.speeds = numbers(e, "experiment", "speeds", x.speeds);
    x.scaling_displacements = numbers(e, "experiment", "scaling_displacements", {});
    x.rtol = number(e, "experiment", "rtol", x.rtol);
    x.atol = number(e, "experiment", "atol", x.atol);
    const double limit = 1e-3 * cfg.geometry.initial_size();
    if (x.displacement < 0.0 || x.displacement > limit * (1.0 + 1e-12)) {
      throw ConfigValidationError("experiment.displacement", "must lie in [0, 1e-3 x geometry.size]");
    }
    for (std::size_t i = 0; i < x.scaling_displacements.size(); ++i) {
      const double dl = x.scaling_displacements[i];
      if (!(dl > 0.0) || dl > limit * (1.0 + 1e-12)) {
        throw ConfigValidationError("experiment.scaling_displacements[" + std::to_string(i) + "]",
                                    "must lie in (0, 1e-3 x geometry.size]");
      }
    }
    if (x.speeds.empty()) throw ConfigValidationError("experiment.speeds", "needs at least one speed");
    for (std::size_t i = 0; i < x.speeds.size(); ++i) {
      if (x.speeds[i] == 0.0) {
        throw ConfigValidationError("experiment.speeds[" + std::to_string(i) + "]", "must be nonzero");
      }
    }
    if (!(x.rtol > 0.0)) throw ConfigValidationError("experiment.rtol", "must be positive");
    if (!(x.atol >= 0.0)) throw ConfigValidationError("experiment.atol", "must be non-negative");
  }
  {
    const auto& o = section("output");
    only_keys(o, "output", {"fields_csv", "fields_meta", "report", "validation"});
    auto& out = cfg.output;
    out.fields_csv = text(o, "output", "fields_csv", out.fields_csv);
    out.fields_meta = text(o, "output", "fields_meta", out.fields_meta);
    out.report = text(o, "output", "report", out.report);
    out.validation = text(o, "output", "validation", out.validation);
    for (const auto* name : {&out.fields_csv, &out.fields_meta, &out.report, &out.validation}) {
      if (name->empty()) throw ConfigValidationError("output", "file names must be non-empty");
    }
  }
  {
    const auto& v = section("validation");
    only_keys(v, "validation", {"random_states", "random_modes"});
    cfg.validation.random_states = static_cast<int>(integer(v, "validation", "random_states", 3));
    cfg.validation.random_modes = static_cast<int>(integer(v, "validation", "random_modes", 8));
    if (cfg.validation.random_states < 0) {
      throw ConfigValidationError("validation.random_states", "must be non-negative");
    }
    if (cfg.validation.random_modes < 1) {
      throw ConfigValidationError("validation.random_modes", "must be at least 1");
    }
  }
  return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
  Json root;
  root["schema"] = kSchemaVersion;
  root["constants"] = {{"hbar", cfg.constants.hbar}, {"mu", cfg.constants.mu}};
  root["geometry"] = {{"dimension", to_string(cfg.geometry.dimension())},
                      {"size", cfg.geometry.initial_size()},
                      {"speed", cfg.geometry.wall_speed()}};
  if (cfg.state.eigenstate) {
    root["state"] = {{"eigenstate", mode_json(*cfg.state.eigenstate)}};
  } else {
    Json list = Json::array();
    for (const auto& [m, b] : cfg.state.coefficients) {
      Json e = mode_json(m);
      e["re"] = b.real();
      e["im"] = b.imag();
      list.push_back(std::move(e));
    }
    root["state"] = {{"coefficients", std::move(list)}};
  }
  root["truncation"] = {{"n_max", cfg.truncation.n_max},
                        {"m_max", cfg.truncation.m_max},
                        {"l_max", cfg.truncation.l_max}};
  root["grid"] = {{"points", cfg.grid.points}, {"boundary", cfg.grid.boundary}};
  root["fields"] = {{"time", cfg.field_time}};
  root["experiment"] = {{"displacement", cfg.experiment.displacement},
                        {"speeds", cfg.experiment.speeds},
                        {"scaling_displacements", cfg.experiment.scaling_displacements},
                        {"rtol", cfg.experiment.rtol},
                        {"atol", cfg.experiment.atol}};
  root["output"] = {{"fields_csv", cfg.output.fields_csv},
                    {"fields_meta", cfg.output.fields_meta},
                    {"report", cfg.output.report},
                    {"validation", cfg.output.validation}};
  root["validation"] = {{"random_states", cfg.validation.random_states},
                        {"random_modes", cfg.validation.random_modes}};
  return root.dump(2) + "\n";
}

}  // namespace qpiston
