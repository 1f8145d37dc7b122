#include "nvdpt/transitions.hpp"

#include "nvdpt/error.hpp"
#include "nvdpt/numerics.hpp"

#include <cmath>
#include <limits>

namespace nvdpt {

namespace {

constexpr double kDegenerateGap = 1e-6;  // MHz
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LocalFit {
  TrackedSpectrum tracked;
  std::size_t center;
  std::vector<int> rank_to_label;
};

// Tracked sweep around b used for curvature fits. Returns nothing when the window cannot
// hold 5 points on one side of zero field or tracking stays ambiguous.
std::optional<LocalFit> local_sweep(const std::shared_ptr<const SpinSystem>& system, double b,
                                    double window, double step) {
  for (int attempt = 0; attempt < 4; ++attempt, step *= 0.5) {
    const double half = 0.5 * window;
    auto m_left = static_cast<long>(std::floor(half / step + 1e-9));
    auto m_right = m_left;
    if (b > 0.0) m_left = std::min(m_left, static_cast<long>(std::floor((b - 0.1) / step + 1e-9)));
    if (b < 0.0) m_right = std::min(m_right, static_cast<long>(std::floor((-0.1 - b) / step + 1e-9)));
    if (b == 0.0 || m_left < 0 || m_right < 0 || m_left + m_right + 1 < 5) return std::nullopt;
    try {
      FieldGrid grid(b - static_cast<double>(m_left) * step, b + static_cast<double>(m_right) * step,
                     step);
      TrackedSpectrum tracked = sweep_eigen(system, grid);
      const auto center = static_cast<std::size_t>(m_left);
      std::vector<int> rank_to_label(static_cast<std::size_t>(tracked.levels()));
      const auto& column = tracked.point(center).column;
      for (std::size_t t = 0; t < column.size(); ++t)
        rank_to_label[static_cast<std::size_t>(column[t])] = static_cast<int>(t);
      return LocalFit{std::move(tracked), center, std::move(rank_to_label)};
    } catch (const AmbiguityError&) {
      continue;
    }
  }
  return std::nullopt;
}

TransitionCurve fit_pair(const TrackedSpectrum& tracked, std::size_t first, std::size_t last,
                         int lo, int hi, double b) {
  std::vector<double> x, y;
  for (std::size_t k = first; k <= last; ++k) {
    x.push_back(tracked.field(k));
    y.push_back(tracked.energy(k, hi) - tracked.energy(k, lo));
  }
  const QuadraticFit fit = fit_quadratic(x, y, b);
  return {fit.value, 1e3 * fit.slope, 1e3 * fit.second};
}

}  // namespace

PumpedDensity pumped_density(const SpinSystem& system, bool normalize) {
  if (system.spec().electron.spin != 1.0)
    throw InvalidArgument("pumped_density: electron spin must be 1");
  const Eigen::Index d = system.dim();
  PumpedDensity out;
  out.rho = ComplexMatrix::Identity(d, d) - system.sz2();
  if (normalize) out.rho /= out.rho.trace().real();
  return out;
}

double transition_matrix_element(const SpinSystem& system, const ComplexVector& f,
                                 const ComplexVector& i) {
  return std::abs(f.dot(system.drive_operator() * i));
}

TransitionIntensity transition_intensity(const SpinSystem& system, const ComplexVector& f,
                                         const ComplexVector& i, const PumpedDensity& rho,
                                         bool tme_squared) {
  TransitionIntensity out;
  out.tme = transition_matrix_element(system, f, i);
  out.d_pop = expectation(rho.rho, f) - expectation(rho.rho, i);
  out.d_sz2 = expectation(system.sz2(), f) - expectation(system.sz2(), i);
  const double t = tme_squared ? out.tme * out.tme : out.tme;
  out.kappa = t * std::abs(out.d_pop) * std::abs(out.d_sz2);
  return out;
}

PairIntensities::PairIntensities(const SpinSystem& system, const LevelSet& levels,
                                 const PumpedDensity& rho, bool tme_squared)
    : squared_(tme_squared) {
  const ComplexMatrix& v = levels.eigen.vectors;
  tme_ = (v.adjoint() * system.drive_operator() * v).cwiseAbs();
  const auto n = static_cast<std::size_t>(levels.size());
  pop_.resize(n);
  sz2_ = levels.sz2;
  for (std::size_t k = 0; k < n; ++k)
    pop_[k] = expectation(rho.rho, v.col(static_cast<Eigen::Index>(k)));
}

TransitionIntensity PairIntensities::operator()(int i, int f) const {
  TransitionIntensity out;
  // |<f|O|i>| = |<i|O|f>| for Hermitian O; symmetrize against rounding so i<->f agree.
  out.tme = 0.5 * (tme_(f, i) + tme_(i, f));
  out.d_pop = pop_[static_cast<std::size_t>(f)] - pop_[static_cast<std::size_t>(i)];
  out.d_sz2 = sz2_[static_cast<std::size_t>(f)] - sz2_[static_cast<std::size_t>(i)];
  const double t = squared_ ? out.tme * out.tme : out.tme;
  out.kappa = t * std::abs(out.d_pop) * std::abs(out.d_sz2);
  return out;
}

double gamma_eff_hellmann_feynman(const LevelSet& levels, int i, int f) {
  const auto& e = levels.eigen.values;
  const int n = levels.size();
  for (int k : {i, f})
    if (k < 0 || k >= n) throw InvalidArgument("gamma_eff_hellmann_feynman: level out of range");
  for (int k : {i, f}) {
    const bool below = k > 0 && e[k] - e[k - 1] <= kDegenerateGap;
    const bool above = k + 1 < n && e[k + 1] - e[k] <= kDegenerateGap;
    if (below || above)
      throw DegeneracyError("level " + std::to_string(k) + " at B = " +
                            std::to_string(levels.b_gauss) +
                            " G is degenerate; use the finite-difference slope");
  }
  return 1e3 * (levels.slope[static_cast<std::size_t>(f)] - levels.slope[static_cast<std::size_t>(i)]);
}

TransitionCurve transition_curve(const TrackedSpectrum& tracked, int level_a, int level_b,
                                 double b_gauss, double window_gauss) {
  const std::size_t np = tracked.points();
  const double half = 0.5 * window_gauss;
  const double eps = 1e-9 * std::max(1.0, std::abs(b_gauss));
  if (!(window_gauss > 0.0) || b_gauss - half < tracked.field(0) - eps ||
      b_gauss + half > tracked.field(np - 1) + eps)
    throw InvalidArgument("transition_curve: window [" + std::to_string(b_gauss - half) + ", " +
                          std::to_string(b_gauss + half) + "] G leaves the tracked range");
  if (level_a < 0 || level_b < 0 || level_a >= tracked.levels() || level_b >= tracked.levels())
    throw InvalidArgument("transition_curve: level label out of range");

  std::size_t first = np, last = 0;
  for (std::size_t k = 0; k < np; ++k) {
    if (std::abs(tracked.field(k) - b_gauss) <= half + eps) {
      first = std::min(first, k);
      last = std::max(last, k);
    }
  }
  if (first == np || last - first + 1 < 5)
    throw InvalidArgument("transition_curve: fewer than 5 grid points in the window");

  const std::size_t c = tracked.nearest(b_gauss);
  int lo = level_a, hi = level_b;
  if (tracked.energy(c, lo) > tracked.energy(c, hi)) std::swap(lo, hi);
  return fit_pair(tracked, first, last, lo, hi, b_gauss);
}

std::vector<TransitionRecord> enumerate_transitions(std::shared_ptr<const SpinSystem> system,
                                                    double b_gauss,
                                                    const TransitionOptions& options) {
  if (!system) throw InvalidArgument("enumerate_transitions: null system");
  const LevelSet levels = diagonalize(*system, b_gauss);
  const PumpedDensity rho = pumped_density(*system, options.convention.normalize_density);
  const PairIntensities intensities(*system, levels, rho, options.convention.tme_squared);

  std::optional<LocalFit> local;
  if (options.with_curvature)
    local = local_sweep(system, b_gauss, options.fit_window_gauss, options.fit_step_gauss);

  std::vector<TransitionRecord> out;
  const int n = levels.size();
  for (int i = 0; i < n; ++i) {
    for (int f = i + 1; f < n; ++f) {
      TransitionRecord r;
      r.b_gauss = b_gauss;
      r.level_i = i;
      r.level_f = f;
      r.nu_mhz = levels.eigen.values[f] - levels.eigen.values[i];
      if (r.nu_mhz < options.fmin_mhz || r.nu_mhz > options.fmax_mhz) continue;
      const TransitionIntensity x = intensities(i, f);
      if (!(x.kappa > options.kappa_min) && options.kappa_min > 0.0) continue;
      r.tme = x.tme;
      r.d_pop = x.d_pop;
      r.d_sz2 = x.d_sz2;
      r.kappa = x.kappa;
      r.manifold_i = levels.manifold[static_cast<std::size_t>(i)];
      r.manifold_f = levels.manifold[static_cast<std::size_t>(f)];

      std::optional<TransitionCurve> curve;
      if (local) {
        const auto& lt = local->tracked;
        const int li = local->rank_to_label[static_cast<std::size_t>(i)];
        const int lf = local->rank_to_label[static_cast<std::size_t>(f)];
        curve = fit_pair(lt, 0, lt.points() - 1, li, lf, b_gauss);
      }
      r.curvature_khz_per_g2 = curve ? curve->curvature_khz_per_g2 : kNaN;
      try {
        r.gamma_eff_khz_per_g = gamma_eff_hellmann_feynman(levels, i, f);
      } catch (const DegeneracyError&) {
        r.gamma_eff_khz_per_g = curve ? curve->gamma_eff_khz_per_g : kNaN;
      }
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace nvdpt
