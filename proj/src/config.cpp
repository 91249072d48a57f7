#include "crossreg/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

void only_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw Error(ErrorCode::ParseError, "unknown key '" + k + "' in " + where);
  }
}

double num(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorCode::ParseError, what + " must be a number");
  return v.get<double>();
}

std::vector<double> nums(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(num(x, what));
  return out;
}

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number()) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return parse_rational(std::string(buf, r.ptr));
  }
  throw Error(ErrorCode::ParseError, "expected a number or a rational string");
}

ScenarioConfig ScenarioConfig::defaults(const std::string& scenario) {
  static const std::set<std::string> known = {"table", "lambda_family", "planar_cross", "spatial_cross"};
  if (!known.count(scenario)) throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + scenario + "'");
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "lambda_family") {
    c.portrait.box = {-1.5, 2.5, -2.0, 2.0};
    c.portrait.starts = {{0.0, 0.05}, {1.0, -0.5}, {-0.3, 1.5}, {0.5, -1.5}};
  } else if (scenario == "planar_cross") {
    c.portrait.box = {-1.0, 1.0, -1.0, 1.0};
    c.portrait.starts = {{0.3, -0.3}, {0.6, -0.2}, {-0.2, 0.2}, {-0.45, 0.9}, {0.0, -0.9}};
    c.portrait.t_max = 30.0;
  }
  return c;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  only_keys(j, {"scenario", "parameters", "tolerances", "portrait", "output"}, "config");
  if (!j.contains("scenario") || !j["scenario"].is_string()) throw Error(ErrorCode::ParseError, "config needs a scenario name");
  auto c = defaults(j["scenario"].get<std::string>());

  if (j.contains("parameters")) {
    const auto& p = j["parameters"];
    if (c.scenario == "table") {
      only_keys(p, {}, "parameters");
    } else if (c.scenario == "lambda_family") {
      only_keys(p, {"lambdas", "epsilons", "eta", "section_x", "search_lo", "search_hi", "seeds", "hausdorff"}, "parameters");
      if (p.contains("lambdas")) c.lambda.lambdas = nums(p["lambdas"], "lambdas");
      if (p.contains("epsilons")) c.lambda.epsilons = nums(p["epsilons"], "epsilons");
      if (p.contains("eta")) c.lambda.eta = num(p["eta"], "eta");
      if (p.contains("section_x")) c.lambda.section_x = num(p["section_x"], "section_x");
      if (p.contains("search_lo")) c.lambda.search_lo = num(p["search_lo"], "search_lo");
      if (p.contains("search_hi")) c.lambda.search_hi = num(p["search_hi"], "search_hi");
      if (p.contains("seeds")) c.lambda.seeds = nums(p["seeds"], "seeds");
      if (p.contains("hausdorff")) c.lambda.hausdorff = p["hausdorff"].get<bool>();
      for (double e : c.lambda.epsilons) {
        if (e < 0.0) throw Error(ErrorCode::InvalidArgument, "epsilons must be nonnegative");
      }
      if (c.lambda.eta < 0.0 || c.lambda.eta >= 1.0) throw Error(ErrorCode::InvalidArgument, "eta must lie in [0, 1)");
    } else if (c.scenario == "planar_cross") {
      only_keys(p, {"C", "B", "D", "drift_time"}, "parameters");
      if (p.contains("C")) c.cross.C = rational_from_json(p["C"]);
      if (p.contains("B")) c.cross.B = rational_from_json(p["B"]);
      if (p.contains("D")) c.cross.D = rational_from_json(p["D"]);
      if (p.contains("drift_time")) c.cross.drift_time = num(p["drift_time"], "drift_time");
      if (c.cross.C <= 0 || c.cross.B <= 0 || c.cross.D <= 0) {
        throw Error(ErrorCode::DegenerateParameters, "planar cross needs C, B, D > 0");
      }
    } else {
      only_keys(p, {"a", "b", "c"}, "parameters");
      if (p.contains("a")) c.a = rational_from_json(p["a"]);
      if (p.contains("b")) c.b = rational_from_json(p["b"]);
      if (p.contains("c")) c.c = rational_from_json(p["c"]);
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    only_keys(t, {"rtol", "atol", "newton_tol", "drift_rtol"}, "tolerances");
    if (t.contains("rtol")) c.lambda.transition.ode.rtol = num(t["rtol"], "rtol");
    if (t.contains("atol")) c.lambda.transition.ode.atol = num(t["atol"], "atol");
    if (t.contains("newton_tol")) c.lambda.cycle.tol = num(t["newton_tol"], "newton_tol");
    if (t.contains("drift_rtol")) c.cross.drift_rtol = num(t["drift_rtol"], "drift_rtol");
  }
  if (j.contains("portrait")) {
    const auto& p = j["portrait"];
    only_keys(p, {"box", "starts", "t_max", "lambda", "eps"}, "portrait");
    if (p.contains("box")) {
      auto b = nums(p["box"], "box");
      if (b.size() != 4 || !(b[0] < b[1]) || !(b[2] < b[3])) {
        throw Error(ErrorCode::InvalidArgument, "box is [xmin, xmax, ymin, ymax] with min < max");
      }
      c.portrait.box = {b[0], b[1], b[2], b[3]};
    }
    if (p.contains("starts")) {
      c.portrait.starts.clear();
      for (const auto& s : p["starts"]) {
        auto v = nums(s, "starts");
        if (v.size() != 2) throw Error(ErrorCode::InvalidArgument, "portrait starts are [x, y] pairs");
        c.portrait.starts.push_back(v);
      }
    }
    if (p.contains("t_max")) c.portrait.t_max = num(p["t_max"], "t_max");
    if (p.contains("lambda")) c.portrait_lambda = num(p["lambda"], "lambda");
    if (p.contains("eps")) c.portrait_eps = num(p["eps"], "eps");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    only_keys(o, {"dir", "format"}, "output");
    if (o.contains("dir")) c.out_dir = o["dir"].get<std::string>();
    if (o.contains("format")) c.format = o["format"].get<std::string>();
    if (c.format != "json" && c.format != "csv" && c.format != "svg") {
      throw Error(ErrorCode::InvalidArgument, "format must be json, csv or svg");
    }
  }
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json run_scenario(const ScenarioConfig& cfg) {
  nlohmann::json out = {{"scenario", cfg.scenario}};
  if (cfg.scenario == "table") {
    out["report"] = run_table().to_json();
  } else if (cfg.scenario == "lambda_family") {
    out["report"] = run_lambda_family(cfg.lambda).to_json();
  } else if (cfg.scenario == "planar_cross") {
    out["report"] = run_planar_cross(cfg.cross).to_json();
  } else {
    out["report"] = run_spatial_cross(cfg.a, cfg.b, cfg.c).to_json();
  }
  return out;
}

std::string scenario_csv(const ScenarioConfig& cfg, const nlohmann::json& report) {
  const auto& r = report.at("report");
  std::ostringstream os;
  if (cfg.scenario == "lambda_family") {
    os << "lambda,eps,found,amplitude,multiplier,period,hausdorff\n";
    auto g = [](const nlohmann::json& v) {
      if (v.is_null()) return std::string();
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return std::string(buf);
    };
    for (const auto& c : r["cycles"]) {
      os << g(c["lambda"]) << ',' << g(c["eps"]) << ',' << (c["found"].get<bool>() ? 1 : 0) << ',' << g(c["amplitude"])
         << ',' << g(c["multiplier"]) << ',' << g(c["period"]) << ',' << g(c["hausdorff"]) << '\n';
    }
    return os.str();
  }
  os << "name,pass,detail\n";
  if (cfg.scenario == "table") {
    for (const auto& row : r["rows"]) {
      std::string res = row["residual"][0].get<std::string>() + " ; " + row["residual"][1].get<std::string>();
      os << csv_escape(row["name"].get<std::string>()) << ',' << (row["pass"].get<bool>() ? 1 : 0) << ','
         << csv_escape("residual " + res) << '\n';
    }
    os << "\"sewing\"," << (r["sewing"]["pass"].get<bool>() ? 1 : 0) << ',' << csv_escape("closed form (3 - x)/2, eps")
       << '\n';
    return os.str();
  }
  for (const auto& c : r["checks"]) {
    os << csv_escape(c["name"].get<std::string>()) << ',' << (c["pass"].get<bool>() ? 1 : 0) << ','
       << csv_escape(c["detail"].get<std::string>()) << '\n';
  }
  return os.str();
}

PortraitData scenario_portrait(const ScenarioConfig& cfg) {
  if (cfg.scenario == "lambda_family") return lambda_portrait(cfg.portrait_lambda, cfg.portrait_eps, cfg.portrait);
  if (cfg.scenario == "planar_cross") return planar_cross_portrait(cfg.cross.C, cfg.cross.B, cfg.cross.D, cfg.portrait);
  throw Error(ErrorCode::InvalidArgument, "portraits exist for lambda_family and planar_cross");
}

}  // namespace crossreg
