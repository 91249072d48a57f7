#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/portrait.hpp"
#include "crossreg/scenarios.hpp"

namespace crossreg {

/// Parsed scenario document. Schema in docs/config.md; every object rejects
/// keys it does not know.
struct ScenarioConfig {
  std::string scenario;  // table, lambda_family, planar_cross, spatial_cross
  LambdaOptions lambda;
  PlanarCrossOptions cross;
  Rational a{0}, b{0}, c{0};
  /// Portrait settings; lambda/eps for the lambda-family portrait.
  PortraitOptions portrait;
  double portrait_lambda = 0.4;
  double portrait_eps = 0.01;
  std::string out_dir = ".";
  std::string format = "json";

  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::string& path);
  /// Defaults for a named scenario.
  static ScenarioConfig defaults(const std::string& scenario);
};

/// Decimal numbers are read through their shortest round-trip text, so 0.05
/// is 1/20; strings like "2/9" are exact.
Rational rational_from_json(const nlohmann::json& v);

/// Runs the scenario and returns its report as JSON.
nlohmann::json run_scenario(const ScenarioConfig& cfg);
/// CSV body for the scenario (lambda family: the sweep table; otherwise
/// name,pass,detail per check).
std::string scenario_csv(const ScenarioConfig& cfg, const nlohmann::json& report);

PortraitData scenario_portrait(const ScenarioConfig& cfg);

}  // namespace crossreg
