// crossreg: command line front end for the scenario registry.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "crossreg/config.hpp"
#include "crossreg/error.hpp"
#include "crossreg/smoothing.hpp"

using namespace crossreg;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string out = ".";
  std::string format = "json";
  double tol = 0.0;
  // flags given on the command line win over the config's output block
  bool out_set = false;
  bool format_set = false;
};

void write_file(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open " + path.string());
  out << body;
  if (!out) throw Error(ErrorCode::IOFailure, "write failed for " + path.string());
  std::cout << path.string() << "\n";
}

ScenarioConfig configure(const std::string& name, const std::string& config, Globals& g) {
  ScenarioConfig cfg = config.empty() ? ScenarioConfig::defaults(name) : ScenarioConfig::load(config);
  if (!name.empty() && cfg.scenario != name) {
    throw Error(ErrorCode::InvalidArgument, "config is for scenario '" + cfg.scenario + "', not '" + name + "'");
  }
  if (g.tol > 0.0) {
    cfg.lambda.transition.ode.rtol = g.tol;
    cfg.lambda.cycle.tol = g.tol;
  }
  if (!g.out_set) g.out = cfg.out_dir;
  if (!g.format_set) g.format = cfg.format;
  return cfg;
}

void emit_report(const ScenarioConfig& cfg, const nlohmann::json& report, const Globals& g) {
  const fs::path dir(g.out);
  if (g.format == "csv") {
    write_file(dir / (cfg.scenario + ".csv"), scenario_csv(cfg, report));
  } else if (g.format == "json") {
    write_file(dir / (cfg.scenario + ".json"), report.dump(1) + "\n");
  } else {
    throw Error(ErrorCode::InvalidArgument, "reports are written as json or csv");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularization of piecewise smooth fields by convolution: scenarios and checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* out_opt = app.add_option("--out", g.out, "output directory")->capture_default_str();
  auto* fmt_opt = app.add_option("--format", g.format, "json, csv or svg")
                      ->check(CLI::IsMember({"json", "csv", "svg"}))
                      ->capture_default_str();
  app.add_option("--tol", g.tol, "integration and Newton tolerance override");

  auto* table = app.add_subcommand("table", "normal-form table and sewing closed form");

  std::string name, config;
  auto* scenario = app.add_subcommand("scenario", "run a named scenario");
  scenario->add_option("name", name, "table, lambda_family, planar_cross, spatial_cross")->required();
  scenario->add_option("--config", config, "JSON config file");

  std::string pname, pconfig;
  auto* portrait = app.add_subcommand("portrait", "phase portrait for lambda_family or planar_cross");
  portrait->add_option("name", pname, "lambda_family or planar_cross")->required();
  portrait->add_option("--config", pconfig, "JSON config file");

  std::string field_path;
  int example = 0;
  double eta = 0.0;
  int grid = 11;
  auto* smooth = app.add_subcommand("smoothcheck", "verify smoothness on every chart of the smoothing plan");
  smooth->add_option("--field", field_path, "piecewise field JSON");
  smooth->add_option("--example", example, "built-in field with 1, 2 or 3 axes");
  smooth->add_option("--eta", eta, "plateau parameter (0: box)")->capture_default_str();
  smooth->add_option("--grid", grid, "grid points per chart variable")->capture_default_str();

  double lambda = 0.4, eps = 0.01;
  auto* poinc = app.add_subcommand("poincare", "limit cycle of the regularized lambda family");
  poinc->add_option("--lambda", lambda)->capture_default_str();
  poinc->add_option("--eps", eps, "0 uses the sewing map")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  g.out_set = out_opt->count() > 0;
  g.format_set = fmt_opt->count() > 0;

  try {
    if (table->parsed()) {
      auto cfg = ScenarioConfig::defaults("table");
      emit_report(cfg, run_scenario(cfg), g);
    } else if (scenario->parsed()) {
      auto cfg = configure(name, config, g);
      emit_report(cfg, run_scenario(cfg), g);
    } else if (portrait->parsed()) {
      auto cfg = configure(pname, pconfig, g);
      const std::string fmt = g.format_set || (!pconfig.empty() && cfg.format != "json") ? g.format : "svg";
      const fs::path path = fs::path(g.out) / (cfg.scenario + "_portrait." + fmt);
      fs::create_directories(g.out);
      write_portrait(scenario_portrait(cfg), fmt, path.string());
      std::cout << path.string() << "\n";
    } else if (smooth->parsed()) {
      PiecewiseField field = smoothing_example(1);
      if (!field_path.empty()) {
        std::ifstream in(field_path);
        if (!in) throw Error(ErrorCode::IOFailure, "cannot read " + field_path);
        field = PiecewiseField::from_json(nlohmann::json::parse(in));
      } else if (example != 0) {
        field = smoothing_example(example);
      } else {
        throw Error(ErrorCode::InvalidArgument, "smoothcheck needs --field or --example");
      }
      RegularizedField rf(field, eta == 0.0 ? Mollifier::box() : Mollifier::plateau(eta));
      SmoothOptions so;
      so.grid_points = grid;
      auto rep = smoothness_report(rf, smoothing_plan(field.locus()), so);
      write_file(fs::path(g.out) / "smoothcheck.json", rep.to_json().dump(1) + "\n");
      return rep.pass() ? 0 : 2;
    } else if (poinc->parsed()) {
      LambdaOptions lo;
      if (g.tol > 0.0) {
        lo.transition.ode.rtol = g.tol;
        lo.cycle.tol = g.tol;
      }
      auto c = lambda_cycle(lambda, eps, lo);
      if (g.format == "csv") {
        std::string body = "x,y\n";
        char buf[80];
        for (const auto& p : c.orbit) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], p[1]);
          body += buf;
        }
        write_file(fs::path(g.out) / "cycle.csv", body);
      } else {
        write_file(fs::path(g.out) / "cycle.json", c.to_json().dump(1) + "\n");
      }
      return c.found ? 0 : 3;
    }
  } catch (const Error& e) {
    std::cerr << "crossreg: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
