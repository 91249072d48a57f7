#include "crossreg/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "crossreg/equilibrium.hpp"
#include "crossreg/error.hpp"
#include "crossreg/scenarios.hpp"

namespace crossreg {

namespace {

std::string g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json lines_json(const std::vector<Polyline>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : v) out.push_back(p);
  return out;
}

// Parameter along a->b where the segment meets the box boundary, entering or leaving.
double boundary_hit(const std::vector<double>& a, const std::vector<double>& b, const Box2& box) {
  double t = 1.0;
  auto cut = [&](double pa, double pb, double lo, double hi) {
    if (pb < lo && pa >= lo) t = std::min(t, (lo - pa) / (pb - pa));
    if (pb > hi && pa <= hi) t = std::min(t, (hi - pa) / (pb - pa));
  };
  cut(a[0], b[0], box.xmin, box.xmax);
  cut(a[1], b[1], box.ymin, box.ymax);
  return t;
}

std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

}  // namespace

nlohmann::json PortraitData::to_json() const {
  nlohmann::json eq = nlohmann::json::array();
  for (const auto& m : equilibria) eq.push_back({{"x", m.x}, {"y", m.y}, {"label", m.label}});
  return {{"title", title},
          {"box", {box.xmin, box.xmax, box.ymin, box.ymax}},
          {"trajectories", lines_json(trajectories)},
          {"nullclines", lines_json(nullclines)},
          {"equilibria", eq},
          {"sections", lines_json(sections)}};
}

std::vector<Polyline> clip(const Polyline& p, const Box2& box) {
  std::vector<Polyline> out;
  Polyline cur;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const bool in = box.contains(p[k][0], p[k][1]);
    if (k > 0) {
      const bool was = box.contains(p[k - 1][0], p[k - 1][1]);
      if (was && !in) {
        cur.push_back(lerp(p[k - 1], p[k], boundary_hit(p[k - 1], p[k], box)));
        if (cur.size() >= 2) out.push_back(std::move(cur));
        cur.clear();
      } else if (!was && in) {
        // entering: run backwards from the inside point
        double t = boundary_hit(p[k], p[k - 1], box);
        cur.push_back(lerp(p[k], p[k - 1], t));
      }
    }
    if (in) cur.push_back(p[k]);
  }
  if (cur.size() >= 2) out.push_back(std::move(cur));
  return out;
}

Polyline orbit_in_box(const VecField& f, std::span<const double> x0, const Box2& box, double t_max, const OdeOptions& opt) {
  Polyline out;
  std::vector<double> x(x0.begin(), x0.end());
  if (!box.contains(x[0], x[1])) return out;
  out.push_back(x);
  const double chunk = 0.25;
  for (double t = 0.0; t < t_max; t += chunk) {
    Trajectory tr;
    try {
      tr = integrate(f, x, 0.0, std::min(chunk, t_max - t), opt);
    } catch (const Error&) {
      break;
    }
    bool left = false;
    for (std::size_t k = 1; k < tr.size(); ++k) {
      // subdivide long steps so the drawn curve follows the flow
      for (int j = 1; j <= 8; ++j) {
        double s = tr.t[k - 1] + (tr.t[k] - tr.t[k - 1]) * j / 8.0;
        auto q = tr.interpolate(s);
        out.push_back(q);
        if (!box.contains(q[0], q[1])) {
          left = true;
          break;
        }
      }
      if (left) break;
    }
    if (left) break;
    x = tr.x.back();
  }
  auto pieces = clip(out, box);
  return pieces.empty() ? Polyline{} : pieces.front();
}

std::vector<Polyline> level_set(const std::function<double(double, double)>& g, const Box2& box, int nx, int ny) {
  const double hx = (box.xmax - box.xmin) / nx, hy = (box.ymax - box.ymin) / ny;
  std::vector<double> v(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  auto at = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(j * (nx + 1) + i)]; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) at(i, j) = g(box.xmin + i * hx, box.ymin + j * hy);
  }
  // marching squares; crossings are keyed by grid edge so neighbouring cells share them exactly.
  // Edge ids: horizontal (i,j)-(i+1,j) is 2*(j*(nx+1)+i), vertical (i,j)-(i,j+1) is that + 1.
  auto hid = [&](int i, int j) { return 2L * (j * (nx + 1) + i); };
  auto vid = [&](int i, int j) { return 2L * (j * (nx + 1) + i) + 1; };
  auto crossing = [&](long id) {
    const long base = id / 2;
    const int i = static_cast<int>(base % (nx + 1)), j = static_cast<int>(base / (nx + 1));
    const int i2 = id % 2 ? i : i + 1, j2 = id % 2 ? j + 1 : j;
    const double a = at(i, j), b = at(i2, j2), t = a / (a - b);
    return std::vector<double>{box.xmin + (i + t * (i2 - i)) * hx, box.ymin + (j + t * (j2 - j)) * hy};
  };
  std::vector<std::pair<long, long>> segs;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const long edge[4] = {hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)};
      std::vector<long> hits;
      for (int e = 0; e < 4; ++e) {
        if ((c[e] < 0.0) != (c[(e + 1) % 4] < 0.0)) hits.push_back(edge[e]);
      }
      if (hits.size() == 2) segs.emplace_back(hits[0], hits[1]);
      if (hits.size() == 4) {
        segs.emplace_back(hits[0], hits[1]);
        segs.emplace_back(hits[2], hits[3]);
      }
    }
  }
  std::multimap<long, std::size_t> ends;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    ends.emplace(segs[s].first, s);
    ends.emplace(segs[s].second, s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto next_from = [&](long e) -> std::ptrdiff_t {
    auto range = ends.equal_range(e);
    for (auto it = range.first; it != range.second; ++it) {
      if (!used[it->second]) return static_cast<std::ptrdiff_t>(it->second);
    }
    return -1;
  };
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<long> ids = {segs[s].first, segs[s].second};
    for (int dir = 0; dir < 2; ++dir) {
      for (;;) {
        const long tip = ids.back();
        auto n = next_from(tip);
        if (n < 0) break;
        used[static_cast<std::size_t>(n)] = true;
        const auto& sg = segs[static_cast<std::size_t>(n)];
        ids.push_back(sg.first == tip ? sg.second : sg.first);
      }
      std::reverse(ids.begin(), ids.end());
    }
    Polyline line;
    for (long e : ids) line.push_back(crossing(e));
    out.push_back(std::move(line));
  }
  return out;
}

std::string render_svg(const PortraitData& d) {
  const double W = 800, H = 600, m = 60;
  const Box2& b = d.box;
  auto sx = [&](double x) { return m + (x - b.xmin) / (b.xmax - b.xmin) * (W - 2 * m); };
  auto sy = [&](double y) { return H - m - (y - b.ymin) / (b.ymax - b.ymin) * (H - 2 * m); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double x = b.xmin + (b.xmax - b.xmin) * k / 4.0, y = b.ymin + (b.ymax - b.ymin) * k / 4.0;
    os << "<text x=\"" << g12(sx(x)) << "\" y=\"" << H - m + 20 << "\" font-size=\"12\" text-anchor=\"middle\">" << g12(x)
       << "</text>\n";
    os << "<text x=\"" << m - 8 << "\" y=\"" << g12(sy(y) + 4) << "\" font-size=\"12\" text-anchor=\"end\">" << g12(y)
       << "</text>\n";
  }
  os << "<text x=\"400\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">" << d.title << "</text>\n";
  auto poly = [&](const Polyline& p, const char* style) {
    if (p.size() < 2) return;
    os << "<path d=\"";
    for (std::size_t k = 0; k < p.size(); ++k) os << (k == 0 ? "M" : " L") << g12(sx(p[k][0])) << ' ' << g12(sy(p[k][1]));
    os << "\" " << style << "/>\n";
  };
  for (const auto& s : d.sections) {
    if (s.size() < 2) continue;
    os << "<polyline points=\"";
    for (std::size_t k = 0; k < s.size(); ++k) os << (k ? " " : "") << g12(sx(s[k][0])) << ',' << g12(sy(s[k][1]));
    os << "\" fill=\"none\" stroke=\"#c00\" stroke-width=\"1\"/>\n";
  }
  for (const auto& n : d.nullclines) poly(n, "fill=\"none\" stroke=\"#2a7\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
  for (const auto& t : d.trajectories) poly(t, "fill=\"none\" stroke=\"#124\" stroke-width=\"1.2\"");
  for (const auto& e : d.equilibria) {
    os << "<circle cx=\"" << g12(sx(e.x)) << "\" cy=\"" << g12(sy(e.y)) << "\" r=\"4\" fill=\""
       << (e.label == "saddle" ? "#c60" : "#06c") << "\"><title>" << e.label << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_csv(const PortraitData& d) {
  std::ostringstream os;
  os << "kind,index,x,y\n";
  auto dump = [&](const char* kind, const std::vector<Polyline>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (const auto& p : v[i]) os << kind << ',' << i << ',' << g17(p[0]) << ',' << g17(p[1]) << '\n';
    }
  };
  dump("trajectory", d.trajectories);
  dump("nullcline", d.nullclines);
  dump("section", d.sections);
  for (std::size_t i = 0; i < d.equilibria.size(); ++i) {
    os << "equilibrium," << i << ',' << g17(d.equilibria[i].x) << ',' << g17(d.equilibria[i].y) << '\n';
  }
  return os.str();
}

void write_portrait(const PortraitData& d, const std::string& format, const std::string& path) {
  std::string body;
  if (format == "svg") {
    body = render_svg(d);
  } else if (format == "csv") {
    body = render_csv(d);
  } else if (format == "json") {
    body = d.to_json().dump(1) + "\n";
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown portrait format '" + format + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open " + path);
  out << body;
  if (!out) throw Error(ErrorCode::IOFailure, "write failed for " + path);
}

PortraitData lambda_portrait(double lambda, double eps, const PortraitOptions& opt) {
  PortraitData d;
  d.title = "regularized lambda family, lambda=" + g12(lambda) + ", eps=" + g12(eps);
  d.box = opt.box;
  RegularizedField rf(lambda_field(Rational(lambda)), Mollifier::box());
  auto f = regularized_vector_field(rf, eps);
  OdeOptions o;
  o.rtol = 1e-9;
  for (const auto& s : opt.starts) {
    auto p = orbit_in_box(f, s, d.box, opt.t_max, o);
    if (p.size() >= 2) d.trajectories.push_back(std::move(p));
  }
  LambdaOptions lo;
  lo.hausdorff = false;
  auto cyc = lambda_cycle(lambda, eps, lo);
  if (cyc.found) {
    for (auto& piece : clip(cyc.orbit, d.box)) d.trajectories.push_back(std::move(piece));
  }
  d.sections.push_back({{d.box.xmin, 0.0}, {d.box.xmax, 0.0}});
  return d;
}

PortraitData planar_cross_portrait(const Rational& C, const Rational& B, const Rational& D, const PortraitOptions& opt) {
  PlanarCrossOptions po;
  po.C = C;
  po.B = B;
  po.D = D;
  auto rep = run_planar_cross(po);
  PortraitData d;
  d.title = "planar cross core field, C=" + rational_to_string(C) + ", B=" + rational_to_string(B) + ", D=" +
            rational_to_string(D);
  d.box = opt.box;
  auto F = planar_cross_field(C, B, D);
  std::vector<CompiledPoly> c = {CompiledPoly(F[0]), CompiledPoly(F[1])};
  for (std::size_t k = 0; k < 2; ++k) {
    auto lines = level_set([&](double x, double y) { double p[2] = {x, y}; return c[k](p); }, d.box);
    for (auto& l : lines) d.nullclines.push_back(std::move(l));
  }
  for (const auto& e : rep.equilibria) {
    if (d.box.contains(e.location[0], e.location[1])) d.equilibria.push_back({e.location[0], e.location[1], to_string(e.kind)});
  }
  VecField X = [&](std::span<const double> x, std::span<double> dx) {
    dx[0] = c[0](x);
    dx[1] = c[1](x);
  };
  for (const auto& s : opt.starts) {
    auto p = orbit_in_box(X, s, d.box, opt.t_max);
    if (p.size() >= 2) d.trajectories.push_back(std::move(p));
  }
  return d;
}

}  // namespace crossreg
