#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/ode.hpp"
#include "crossreg/poincare.hpp"

namespace crossreg {

struct Box2 {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool contains(double x, double y) const { return x >= xmin && x <= xmax && y >= ymin && y <= ymax; }
};

struct Marker {
  double x = 0.0, y = 0.0;
  std::string label;
};

struct PortraitData {
  std::string title;
  Box2 box;
  std::vector<Polyline> trajectories;
  std::vector<Polyline> nullclines;
  std::vector<Marker> equilibria;
  std::vector<Polyline> sections;

  nlohmann::json to_json() const;
};

/// Pieces of a planar polyline inside the box; crossing segments are cut at the boundary.
std::vector<Polyline> clip(const Polyline& p, const Box2& box);

/// Forward orbit from x0 until it leaves the box or reaches t_max, clipped.
Polyline orbit_in_box(const VecField& f, std::span<const double> x0, const Box2& box, double t_max,
                      const OdeOptions& opt = {});

/// Zero set of a planar function on a grid by marching squares, joined into polylines.
std::vector<Polyline> level_set(const std::function<double(double, double)>& g, const Box2& box, int nx = 200,
                                int ny = 200);

/// SVG 800x600, coordinates with 12 significant digits, one path per trajectory
/// and per nullcline in input order. Axes and markers use other elements.
std::string render_svg(const PortraitData& d);
/// kind,index,x,y rows (kind in trajectory, nullcline, section, equilibrium).
std::string render_csv(const PortraitData& d);

/// format: svg, csv or json. Errors: IOFailure, InvalidArgument.
void write_portrait(const PortraitData& d, const std::string& format, const std::string& path);

struct PortraitOptions {
  Box2 box;
  std::vector<std::vector<double>> starts;
  double t_max = 20.0;
};

/// Regularized lambda family at one eps: sample orbits, the cycle if one is
/// found, and {y = 0}.
PortraitData lambda_portrait(double lambda, double eps, const PortraitOptions& opt);
/// Planar cross core field: isoclines f = 0 and g = 0, classified equilibria, orbits.
PortraitData planar_cross_portrait(const Rational& C, const Rational& B, const Rational& D, const PortraitOptions& opt);

}  // namespace crossreg
