#include "nvdpt/zefoz.hpp"

#include "nvdpt/error.hpp"
#include "nvdpt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nvdpt {

void validate(const LinewidthModel& model) {
  if (!(model.bath_field_gauss > 0.0) || !(model.floor_mhz > 0.0) || !(model.reference_mhz > 0.0))
    throw InvalidArgument("linewidth model parameters must be positive");
}

LinewidthPrediction predict_linewidth(double gamma_eff_khz_per_g, double curvature_khz_per_g2,
                                      const LinewidthModel& model) {
  validate(model);
  const double g = std::isfinite(gamma_eff_khz_per_g) ? std::abs(gamma_eff_khz_per_g) * 1e-3 : 0.0;
  const double c = std::isfinite(curvature_khz_per_g2) ? std::abs(curvature_khz_per_g2) * 1e-3 : 0.0;
  const double db = model.bath_field_gauss;
  const double first = g * db;
  const double second = 0.5 * c * db * db;
  LinewidthPrediction out;
  out.fwhm_mhz = std::sqrt(first * first + second * second + model.floor_mhz * model.floor_mhz);
  out.epsilon = model.reference_mhz / out.fwhm_mhz;
  return out;
}

std::vector<double> epsilon_table(std::span<const ObservedLine> observed,
                                  const LinewidthModel& model) {
  validate(model);
  std::vector<double> out;
  out.reserve(observed.size());
  for (const auto& line : observed) {
    if (!(line.fwhm_mhz > 0.0))
      throw InvalidArgument("epsilon_table: linewidth must be positive (line at " +
                            std::to_string(line.nu_mhz) + " MHz)");
    out.push_back(model.reference_mhz / line.fwhm_mhz);
  }
  return out;
}

double field_resolution(double n_spins, double t_meas_s, double t2_star_s, double gamma_mhz_per_g) {
  for (double x : {n_spins, t_meas_s, t2_star_s, gamma_mhz_per_g})
    if (!(x > 0.0) || !std::isfinite(x))
      throw InvalidArgument("field_resolution: inputs must be positive and finite");
  return 1.0 / (gamma_mhz_per_g * 1e6 * std::sqrt(n_spins * t_meas_s * t2_star_s));
}

double field_resolution_from_linewidth(double n_spins, double linewidth_mhz,
                                       double gamma_mhz_per_g) {
  if (!(linewidth_mhz > 0.0) || !std::isfinite(linewidth_mhz))
    throw InvalidArgument("field_resolution: linewidth must be positive and finite");
  const double t = 1.0 / (linewidth_mhz * 1e6);
  return field_resolution(n_spins, t, t, gamma_mhz_per_g);
}

namespace {

struct PairSlope {
  double gamma_khz;  // signed, d(E_b - E_a)/dB
  double nu;         // E_b - E_a
  ComplexVector state_a, state_b;
};

// Re-diagonalizes at b and identifies the two trajectories by overlap with grid point k.
PairSlope pair_slope_at(const TrackedSpectrum& tracked, std::size_t k, int a, int b_label,
                        double b) {
  const SpinSystem& system = tracked.system();
  const LevelSet levels = diagonalize(system, b);
  const int n = tracked.levels();
  ComplexMatrix reference(n, n);
  for (int t = 0; t < n; ++t) reference.col(t) = tracked.state(k, t);
  const std::vector<int> column = match_levels(reference, levels.eigen.vectors, 0.0, b, b);
  const int ca = column[static_cast<std::size_t>(a)];
  const int cb = column[static_cast<std::size_t>(b_label)];
  return {1e3 * (levels.slope[static_cast<std::size_t>(cb)] - levels.slope[static_cast<std::size_t>(ca)]),
          levels.eigen.values[cb] - levels.eigen.values[ca], levels.eigen.vectors.col(ca),
          levels.eigen.vectors.col(cb)};
}

}  // namespace

double tracked_pair_slope(const TrackedSpectrum& tracked, int label_a, int label_b, double b_gauss) {
  if (label_a < 0 || label_b < 0 || label_a >= tracked.levels() || label_b >= tracked.levels())
    throw InvalidArgument("tracked_pair_slope: level label out of range");
  return pair_slope_at(tracked, tracked.nearest(b_gauss), label_a, label_b, b_gauss).gamma_khz;
}

std::vector<DptRecord> scan_dpt(const TrackedSpectrum& tracked, const DptOptions& options) {
  validate(options.linewidth);
  const std::size_t np = tracked.points();
  if (np < 3) throw InvalidArgument("scan_dpt: need at least 3 tracked points");
  const double lo = options.b_min < options.b_max ? options.b_min : tracked.field(0);
  const double hi = options.b_min < options.b_max ? options.b_max : tracked.field(np - 1);
  const double eps = 1e-9 * std::max(1.0, std::abs(hi));
  if (lo < tracked.field(0) - eps || hi > tracked.field(np - 1) + eps)
    throw InvalidArgument("scan_dpt: search range is not covered by the tracked spectrum");
  if (tracked.grid().step() > 1.0 + 1e-12)
    throw InvalidArgument("scan_dpt: tracked step must be at most 1 G");

  std::vector<std::size_t> in_range;
  for (std::size_t k = 0; k < np; ++k)
    if (tracked.field(k) >= lo - eps && tracked.field(k) <= hi + eps) in_range.push_back(k);
  if (in_range.size() < 3) throw InvalidArgument("scan_dpt: fewer than 3 grid points in range");

  const SpinSystem& system = tracked.system();
  const PumpedDensity rho = pumped_density(system, options.convention.normalize_density);
  const int n = tracked.levels();

  // kappa and slope per trajectory pair per in-range point.
  const std::size_t m = in_range.size();
  std::vector<std::vector<double>> kappa(static_cast<std::size_t>(n * n), std::vector<double>(m));
  std::vector<std::vector<double>> slope(static_cast<std::size_t>(n), std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& point = tracked.point(in_range[j]);
    const PairIntensities x(system, point.levels, rho, options.convention.tme_squared);
    for (int a = 0; a < n; ++a) {
      const int ca = point.column[static_cast<std::size_t>(a)];
      slope[static_cast<std::size_t>(a)][j] = 1e3 * point.levels.slope[static_cast<std::size_t>(ca)];
      for (int b = a + 1; b < n; ++b) {
        const int cb = point.column[static_cast<std::size_t>(b)];
        kappa[static_cast<std::size_t>(a * n + b)][j] = x(ca, cb).kappa;
      }
    }
  }

  std::vector<DptRecord> out;
  bool any_pair = false;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto& kp = kappa[static_cast<std::size_t>(a * n + b)];
      if (*std::max_element(kp.begin(), kp.end()) < options.kappa_min) continue;
      any_pair = true;

      auto abs_gamma = [&](std::size_t j) {
        return std::abs(slope[static_cast<std::size_t>(b)][j] - slope[static_cast<std::size_t>(a)][j]);
      };
      for (std::size_t j = 1; j + 1 < m; ++j) {
        const double g = abs_gamma(j);
        // Rounding noise on a flat slope must not register as a minimum.
        const double eps = 1e-9 * std::max(1.0, g);
        if (!(g <= abs_gamma(j - 1) + eps && g < abs_gamma(j + 1) - eps)) continue;
        const std::size_t k = in_range[j];
        const ScalarMinimum best = golden_section_minimize(
            [&](double x) { return std::abs(pair_slope_at(tracked, k, a, b, x).gamma_khz); },
            tracked.field(k - 1), tracked.field(k + 1), options.refine_tol);
        double b_opt = best.x;
        if (g < best.fx) b_opt = tracked.field(k);

        const PairSlope at = pair_slope_at(tracked, k, a, b, b_opt);
        DptRecord r;
        const bool flip = at.nu < 0.0;
        r.level_i = flip ? b : a;
        r.level_f = flip ? a : b;
        r.b_opt = b_opt;
        r.nu_mhz = std::abs(at.nu);
        r.gamma_eff_khz_per_g = flip ? -at.gamma_khz : at.gamma_khz;
        const ComplexVector& si = flip ? at.state_b : at.state_a;
        const ComplexVector& sf = flip ? at.state_a : at.state_b;
        r.kappa = transition_intensity(system, sf, si, rho, options.convention.tme_squared).kappa;
        if (options.observable_only && r.kappa < options.kappa_min) continue;
        r.manifold_i = classify_manifold(system, si);
        r.manifold_f = classify_manifold(system, sf);

        // Curvature from the tracked grid, window clipped to the tracked range.
        const double half = std::min({0.5 * options.fit_window_gauss, b_opt - tracked.field(0),
                                      tracked.field(np - 1) - b_opt});
        try {
          r.curvature_khz_per_g2 =
              transition_curve(tracked, r.level_i, r.level_f, b_opt, 2.0 * half).curvature_khz_per_g2;
        } catch (const InvalidArgument&) {
          r.curvature_khz_per_g2 = std::numeric_limits<double>::quiet_NaN();
        }
        const LinewidthPrediction lw =
            predict_linewidth(r.gamma_eff_khz_per_g, r.curvature_khz_per_g2, options.linewidth);
        r.fwhm_mhz = lw.fwhm_mhz;
        r.epsilon = lw.epsilon;
        out.push_back(r);
      }
    }
  }
  if (!any_pair) throw EmptyResult("scan_dpt: no transition reaches the kappa threshold in range");

  std::sort(out.begin(), out.end(), [](const DptRecord& x, const DptRecord& y) {
    const double gx = std::abs(x.gamma_eff_khz_per_g), gy = std::abs(y.gamma_eff_khz_per_g);
    if (gx != gy) return gx < gy;
    if (x.level_i != y.level_i) return x.level_i < y.level_i;
    if (x.level_f != y.level_f) return x.level_f < y.level_f;
    return x.b_opt < y.b_opt;
  });
  return out;
}

}  // namespace nvdpt
