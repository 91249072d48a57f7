#include "crossreg/mollifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "crossreg/error.hpp"
#include "crossreg/quadrature.hpp"

namespace crossreg {

double smooth_step(double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  // e^{-1/v} / (e^{-1/v} + e^{-1/(1-v)}) with a single exponential
  double d = 1.0 / v - 1.0 / (1.0 - v);
  if (d > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(d));
}

// The band [1-eta, 1] is cut into equal panels carrying a GL10 rule each.
// Prefix sums over whole panels make a band moment cost one partial panel.
struct Mollifier::BandTable {
  static constexpr int kPanels = 128;
  static constexpr int kOrders = 16;
  double start = 0.0;
  double width = 0.0;
  std::vector<double> nodes;
  std::vector<double> weighted;
  std::vector<std::vector<double>> prefix;
};

Mollifier::Mollifier(double eta) : eta_(eta) {
  if (eta_ == 0.0) return;
  auto table = std::make_shared<BandTable>();
  const auto& rule = GaussLegendre10::get();
  table->start = 1.0 - eta_;
  table->width = eta_ / BandTable::kPanels;
  for (int k = 0; k < BandTable::kPanels; ++k) {
    double a = table->start + k * table->width;
    for (std::size_t q = 0; q < 10; ++q) {
      double t = a + 0.5 * table->width * (1.0 + rule.nodes[q]);
      table->nodes.push_back(t);
      table->weighted.push_back(0.5 * table->width * rule.weights[q] * profile(t));
    }
  }
  table->prefix.assign(BandTable::kOrders, std::vector<double>(BandTable::kPanels + 1, 0.0));
  for (int j = 0; j < BandTable::kOrders; ++j) {
    for (int k = 0; k < BandTable::kPanels; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < 10; ++q) {
        std::size_t i = static_cast<std::size_t>(k) * 10 + q;
        s += std::pow(table->nodes[i], j) * table->weighted[i];
      }
      table->prefix[static_cast<std::size_t>(j)][static_cast<std::size_t>(k) + 1] =
          table->prefix[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] + s;
    }
  }
  band_ = std::move(table);
}

Mollifier Mollifier::plateau(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "plateau eta must lie in (0, 1)");
  return Mollifier(eta);
}

double Mollifier::band_integral(int j, double y) const {
  const BandTable& b = *band_;
  y = std::clamp(y, b.start, 1.0);
  int k = std::min(static_cast<int>((y - b.start) / b.width), BandTable::kPanels);
  double base = 0.0;
  if (j < BandTable::kOrders) {
    base = b.prefix[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  } else {
    for (std::size_t i = 0; i < static_cast<std::size_t>(k) * 10; ++i) base += std::pow(b.nodes[i], j) * b.weighted[i];
  }
  double a = b.start + k * b.width;
  if (!(y > a)) return base;
  const auto& rule = GaussLegendre10::get();
  double half = 0.5 * (y - a), mid = 0.5 * (y + a), s = 0.0;
  for (std::size_t q = 0; q < 10; ++q) {
    double t = mid + half * rule.nodes[q];
    s += rule.weights[q] * std::pow(t, j) * profile(t);
  }
  return base + half * s;
}

void Mollifier::add_band_integrals(int K, double y, double scale, double sign, std::span<double> out) const {
  const BandTable& b = *band_;
  y = std::clamp(y, b.start, 1.0);
  int k = std::min(static_cast<int>((y - b.start) / b.width), BandTable::kPanels);
  double a = b.start + k * b.width;
  std::array<double, 10> t{}, wt{};
  bool partial = y > a;
  if (partial) {
    const auto& rule = GaussLegendre10::get();
    double half = 0.5 * (y - a), mid = 0.5 * (y + a);
    for (std::size_t q = 0; q < 10; ++q) {
      t[q] = mid + half * rule.nodes[q];
      wt[q] = half * rule.weights[q] * profile(t[q]);
    }
  }
  double sj = scale;
  for (int j = 0; j <= K; ++j) {
    double v = j < BandTable::kOrders ? b.prefix[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] : 0.0;
    if (j >= BandTable::kOrders) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(k) * 10; ++i) v += std::pow(b.nodes[i], j) * b.weighted[i];
    }
    if (partial) {
      for (std::size_t q = 0; q < 10; ++q) {
        v += wt[q];
        wt[q] *= t[q];
      }
    }
    out[static_cast<std::size_t>(j)] += sj * v;
    sj *= sign;
  }
}

double Mollifier::profile(double t) const {
  double u = std::abs(t);
  if (u >= 1.0) return u == 1.0 && is_box() ? 0.5 : 0.0;
  if (u <= 1.0 - eta_) return height();
  return height() * smooth_step((1.0 - u) / eta_);
}

namespace {

double power_moment(int j, double lo, double hi) {
  return (std::pow(hi, j + 1) - std::pow(lo, j + 1)) / (j + 1);
}

}  // namespace

double Mollifier::moment(int j, double lo, double hi) const {
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  if (!(hi > lo)) return 0.0;
  if (is_box()) return 0.5 * power_moment(j, lo, hi);
  const double p = 1.0 - eta_;
  double total = 0.0;
  double plo = std::max(lo, -p);
  double phi = std::min(hi, p);
  if (phi > plo) total += height() * power_moment(j, plo, phi);
  // Lower band by the reflection t -> -t of the even profile.
  double a = std::max(lo, p), b = hi;
  if (b > a) total += band_integral(j, b) - band_integral(j, a);
  a = lo;
  b = std::min(hi, -p);
  if (b > a) total += (j % 2 ? -1.0 : 1.0) * (band_integral(j, -a) - band_integral(j, -b));
  return total;
}

void Mollifier::moments(int K, double lo, double hi, std::span<double> out) const {
  std::fill(out.begin(), out.begin() + K + 1, 0.0);
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  if (!(hi > lo)) return;
  auto add_power = [&](double c, double u, double v) {
    double pu = u, pv = v;
    for (int j = 0; j <= K; ++j) {
      out[static_cast<std::size_t>(j)] += c * (pv - pu) / (j + 1);
      pu *= u;
      pv *= v;
    }
  };
  if (is_box()) {
    add_power(0.5, lo, hi);
    return;
  }
  const double p = 1.0 - eta_;
  double plo = std::max(lo, -p), phi = std::min(hi, p);
  if (phi > plo) add_power(height(), plo, phi);
  double a = std::max(lo, p), b = hi;
  if (b > a) {
    add_band_integrals(K, b, 1.0, 1.0, out);
    add_band_integrals(K, a, -1.0, 1.0, out);
  }
  a = lo;
  b = std::min(hi, -p);
  if (b > a) {
    add_band_integrals(K, -a, 1.0, -1.0, out);
    add_band_integrals(K, -b, -1.0, -1.0, out);
  }
}

std::vector<double> Mollifier::breakpoints() const {
  if (is_box()) return {-1.0, 1.0};
  return {-1.0, -(1.0 - eta_), 1.0 - eta_, 1.0};
}

nlohmann::json Mollifier::to_json() const {
  if (is_box()) return {{"kind", "box"}};
  return {{"kind", "plateau"}, {"eta", eta_}};
}

Mollifier Mollifier::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(ErrorCode::ParseError, "mollifier needs a kind");
  auto kind = j.at("kind").get<std::string>();
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && !(kind == "plateau" && key == "eta")) throw Error(ErrorCode::ParseError, "unknown mollifier key '" + key + "'");
  }
  if (kind == "box") return box();
  if (kind == "plateau") {
    if (!j.contains("eta")) throw Error(ErrorCode::ParseError, "plateau mollifier needs eta");
    return plateau(j.at("eta").get<double>());
  }
  throw Error(ErrorCode::ParseError, "unknown mollifier kind '" + kind + "'");
}

Weights weight_functions(const Mollifier& m, double y) {
  double plus = std::clamp(m.mass_below(y), 0.0, 1.0);
  return {plus, 1.0 - plus, 2.0 * plus - 1.0};
}

}  // namespace crossreg
