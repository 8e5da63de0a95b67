// qpiston: fields | work | validate for a scenario config.
//
// Exit status: 0 success, 1 runtime failure, 2 bad config or arguments,
// 3 validation checks failed. Failures print one JSON error record on stderr.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpiston/config.hpp"
#include "qpiston/errors.hpp"
#include "qpiston/scenario.hpp"

namespace {

int emit_error(const std::string& kind, const std::string& message, nlohmann::ordered_json extra = {}) {
  nlohmann::ordered_json rec;
  rec["error"] = {{"kind", kind}, {"message", message}};
  for (const auto& [k, v] : extra.items()) rec["error"][k] = v;
  std::cerr << rec.dump() << std::endl;
  return kind == "runtime" ? 1 : 2;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-wall quantum well laboratory: energy densities, wall work, invariants"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario JSON file")->required();
    sub->add_option("--out", out_dir, "output directory (must exist)");
    sub->add_option("--seed", seed, "seed for random validation states");
    sub->add_flag("--quiet", quiet, "suppress progress and warnings");
  };
  auto* fields = app.add_subcommand("fields", "evaluate densities and fluxes on the quadrature grid");
  auto* work = app.add_subcommand("work", "run the moving-wall work experiment");
  auto* validate = app.add_subcommand("validate", "check the invariants on the configured and random states");
  add_common(fields);
  add_common(work);
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("usage", e.what());
  }

  try {
    const auto config = qpiston::parse_config(read_file(config_path));
    qpiston::RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.log = quiet ? nullptr : &std::cerr;
    if (fields->parsed()) {
      qpiston::run_fields(config, ctx);
    } else if (work->parsed()) {
      qpiston::run_work(config, ctx);
    } else {
      const auto result = qpiston::run_validate(config, ctx);
      if (!result.all_pass()) {
        emit_error("validation", "one or more invariant checks failed");
        return 3;
      }
    }
  } catch (const qpiston::ConfigParseError& e) {
    return emit_error("parse", e.what(), {{"line", e.line()}, {"column", e.column()}});
  } catch (const qpiston::ConfigValidationError& e) {
    return emit_error("config", e.what(), {{"path", e.path()}});
  } catch (const qpiston::ExperimentError& e) {
    return emit_error("runtime", e.what(), {{"speed", e.speed()}});
  } catch (const qpiston::StepSizeUnderflow& e) {
    return emit_error("runtime", e.what(), {{"time_reached", e.time_reached()}});
  } catch (const std::exception& e) {
    return emit_error("runtime", e.what());
  }
  return 0;
}
