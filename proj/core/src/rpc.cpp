#include "geoshadow/rpc.hpp"

#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "geoshadow/error.hpp"

namespace geoshadow {

void RpcModel::validate() const {
  const std::pair<const char*, double> scales[] = {
      {"LAT_SCALE", lat_scale},   {"LONG_SCALE", lon_scale}, {"HEIGHT_SCALE", height_scale},
      {"LINE_SCALE", line_scale}, {"SAMP_SCALE", samp_scale}};
  for (const auto& [name, value] : scales) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ArgumentError(std::string("RPC ") + name + " must be strictly positive");
    }
  }
  if (line_den[0] == 0.0) throw ArgumentError("RPC LINE_DEN_COEFF_1 must be nonzero");
  if (samp_den[0] == 0.0) throw ArgumentError("RPC SAMP_DEN_COEFF_1 must be nonzero");
}

double evaluate_polynomial(const RpcModel::Coefficients& c, double l, double p, double h) {
  // Grouped by powers of H, then P, then L.
  const double h0 = c[0] + l * (c[1] + l * (c[7] + l * c[11])) + p * (c[2] + l * (c[4] + l * c[14]) + p * (c[8] + l * c[12] + p * c[15]));
  const double h1 = c[3] + l * (c[5] + l * c[17]) + p * (c[6] + l * c[10] + p * c[18]);
  const double h2 = c[9] + l * c[13] + p * c[16];
  const double h3 = c[19];
  return h0 + h * (h1 + h * (h2 + h * h3));
}

namespace {

struct Normalized {
  double l, p, h;
};

Normalized normalize(const RpcModel& m, double lon, double lat, double height) {
  return {(lon - m.lon_off) / m.lon_scale, (lat - m.lat_off) / m.lat_scale, (height - m.height_off) / m.height_scale};
}

// (sample, line) from normalized ground coordinates.
std::pair<double, double> project_normalized(const RpcModel& m, const Normalized& n) {
  const double line_den = evaluate_polynomial(m.line_den, n.l, n.p, n.h);
  const double samp_den = evaluate_polynomial(m.samp_den, n.l, n.p, n.h);
  if (!(std::fabs(line_den) >= 1e-10) || !(std::fabs(samp_den) >= 1e-10)) {
    throw SingularCameraError("RPC denominator vanishes at normalized (" + std::to_string(n.l) + ", " +
                              std::to_string(n.p) + ", " + std::to_string(n.h) + ")");
  }
  const double line = m.line_off + m.line_scale * (evaluate_polynomial(m.line_num, n.l, n.p, n.h) / line_den);
  const double sample = m.samp_off + m.samp_scale * (evaluate_polynomial(m.samp_num, n.l, n.p, n.h) / samp_den);
  return {sample, line};
}

}  // namespace

ImagePoint eval_rational(const RpcModel& model, double lon, double lat, double height) {
  const Normalized n = normalize(model, lon, lat, height);
  const auto [sample, line] = project_normalized(model, n);
  const bool outside = std::fabs(n.l) > 1.5 || std::fabs(n.p) > 1.5 || std::fabs(n.h) > 1.5;
  return {sample, line, outside};
}

GroundPoint localize(const RpcModel& model, double sample, double line, double height,
                     const LocalizeOptions& options) {
  const double h = (height - model.height_off) / model.height_scale;
  double l = 0.0;
  double p = 0.0;

  auto residual_at = [&](double ll, double pp) {
    const auto [s, ln] = project_normalized(model, {ll, pp, h});
    return std::pair{s - sample, ln - line};
  };

  auto [rs, rl] = residual_at(l, p);
  double residual = std::hypot(rs, rl);
  int iteration = 0;
  while (residual >= options.tolerance_px) {
    if (iteration == options.max_iterations) {
      throw LocalizationError("RPC localization did not converge after " + std::to_string(iteration) +
                                  " iterations (residual " + std::to_string(residual) + " px)",
                              residual, iteration);
    }
    ++iteration;

    const double step = options.step;
    const auto [sl_plus, ll_plus] = residual_at(l + step, p);
    const auto [sl_minus, ll_minus] = residual_at(l - step, p);
    const auto [sp_plus, lp_plus] = residual_at(l, p + step);
    const auto [sp_minus, lp_minus] = residual_at(l, p - step);
    const double ds_dl = (sl_plus - sl_minus) / (2.0 * step);
    const double dl_dl = (ll_plus - ll_minus) / (2.0 * step);
    const double ds_dp = (sp_plus - sp_minus) / (2.0 * step);
    const double dl_dp = (lp_plus - lp_minus) / (2.0 * step);

    const double det = ds_dl * dl_dp - ds_dp * dl_dl;
    const double norm = std::fabs(ds_dl) + std::fabs(dl_dp) + std::fabs(ds_dp) + std::fabs(dl_dl);
    if (!(std::fabs(det) > 1e-14 * norm * norm)) {
      throw LocalizationError("RPC localization hit a singular Jacobian", residual, iteration);
    }
    // Solve J * delta = residual.
    const double delta_l = (rs * dl_dp - rl * ds_dp) / det;
    const double delta_p = (ds_dl * rl - dl_dl * rs) / det;
    l -= delta_l;
    p -= delta_p;

    std::tie(rs, rl) = residual_at(l, p);
    residual = std::hypot(rs, rl);
    if (!std::isfinite(residual)) {
      throw LocalizationError("RPC localization diverged", residual, iteration);
    }
  }
  return {model.lon_off + l * model.lon_scale, model.lat_off + p * model.lat_scale, iteration, residual};
}

}  // namespace geoshadow
