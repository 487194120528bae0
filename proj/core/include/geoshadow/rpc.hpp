#pragma once

#include <array>

namespace geoshadow {

/// Cubic rational polynomial camera (RPC00B term ordering).
///
/// With normalized L = (lon - lon_off) / lon_scale, P = (lat - lat_off) / lat_scale
/// and H = (height - height_off) / height_scale, each polynomial is
///   c0 + c1 L + c2 P + c3 H + c4 LP + c5 LH + c6 PH + c7 L^2 + c8 P^2 + c9 H^2
///   + c10 PLH + c11 L^3 + c12 LP^2 + c13 LH^2 + c14 L^2P + c15 P^3 + c16 PH^2
///   + c17 L^2H + c18 P^2H + c19 H^3
/// and line = line_off + line_scale * line_num / line_den (likewise for sample).
struct RpcModel {
  using Coefficients = std::array<double, 20>;

  Coefficients line_num{};
  Coefficients line_den{};
  Coefficients samp_num{};
  Coefficients samp_den{};

  double lat_off = 0.0;
  double lat_scale = 1.0;
  double lon_off = 0.0;
  double lon_scale = 1.0;
  double height_off = 0.0;
  double height_scale = 1.0;
  double line_off = 0.0;
  double line_scale = 1.0;
  double samp_off = 0.0;
  double samp_scale = 1.0;

  bool operator==(const RpcModel&) const = default;

  /// Throws ArgumentError when a scale is not strictly positive or a
  /// denominator has a zero constant term.
  void validate() const;
};

/// Evaluates one 20-term RPC00B polynomial at normalized coordinates.
double evaluate_polynomial(const RpcModel::Coefficients& c, double l, double p, double h);

struct ImagePoint {
  double sample = 0.0;
  double line = 0.0;
  // Set when a normalized input coordinate exceeds 1.5 in magnitude.
  bool extrapolated = false;
};

/// Ground (lon, lat degrees; height meters) to image (sample, line) pixels.
/// Throws SingularCameraError when a denominator magnitude drops below 1e-10.
ImagePoint eval_rational(const RpcModel& model, double lon, double lat, double height);

struct GroundPoint {
  double lon = 0.0;
  double lat = 0.0;
  int iterations = 0;
  double residual_px = 0.0;
};

struct LocalizeOptions {
  double tolerance_px = 1e-9;
  int max_iterations = 50;
  // Central-difference step in normalized units.
  double step = 1e-7;
};

/// Image (sample, line) at a known height back to ground (lon, lat).
///
/// Newton iteration on (lon, lat) starting at (lon_off, lat_off), using a
/// central finite-difference Jacobian. Throws LocalizationError (carrying the
/// last residual) on non-convergence or a singular Jacobian.
GroundPoint localize(const RpcModel& model, double sample, double line, double height,
                     const LocalizeOptions& options = {});

}  // namespace geoshadow
