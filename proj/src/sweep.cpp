#include "nvdpt/sweep.hpp"

#include "nvdpt/error.hpp"
#include "nvdpt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nvdpt {

std::string manifold_name(const Manifold& m) {
  return m ? std::to_string(*m) : std::string("mixed");
}

Manifold classify_manifold(double sz_expect, double sz2_expect) {
  const double label = std::round(sz_expect);
  if (std::abs(sz_expect - label) > 0.4) return std::nullopt;
  if (std::abs(sz2_expect - label * label) > 0.4) return std::nullopt;
  return static_cast<int>(label);
}

Manifold classify_manifold(const SpinSystem& system, const ComplexVector& state) {
  return classify_manifold(expectation(system.sz(), state), expectation(system.sz2(), state));
}

LevelSet diagonalize(const SpinSystem& system, double b_gauss) {
  const std::array<ComplexMatrix, 2> tie_break = {system.sz(), system.kz()};
  LevelSet out;
  out.b_gauss = b_gauss;
  out.eigen = hermitian_eig(system.hamiltonian(b_gauss), tie_break);
  const int n = out.size();
  out.sz.resize(static_cast<std::size_t>(n));
  out.kz.resize(static_cast<std::size_t>(n));
  out.sz2.resize(static_cast<std::size_t>(n));
  out.slope.resize(static_cast<std::size_t>(n));
  out.manifold.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const ComplexVector v = out.eigen.vectors.col(k);
    const auto i = static_cast<std::size_t>(k);
    out.sz[i] = expectation(system.sz(), v);
    out.kz[i] = expectation(system.kz(), v);
    out.sz2[i] = expectation(system.sz2(), v);
    out.slope[i] = expectation(system.field_derivative(), v);
    out.manifold[i] = classify_manifold(out.sz[i], out.sz2[i]);
  }
  return out;
}

FieldGrid::FieldGrid(double b_start, double b_end, double step)
    : start_(b_start), end_(b_end), step_(step) {
  if (!std::isfinite(b_start) || !std::isfinite(b_end) || !std::isfinite(step))
    throw InvalidArgument("field grid bounds must be finite");
  if (!(step > 0.0)) throw InvalidArgument("field grid step must be positive");
  if (!(b_start < b_end)) throw InvalidArgument("field grid requires start < end");
  if (step > b_end - b_start) throw InvalidArgument("field grid step exceeds the range");
  count_ = static_cast<std::size_t>(std::floor((b_end - b_start) / step + 1e-9)) + 1;
}

TrackedSpectrum::TrackedSpectrum(std::shared_ptr<const SpinSystem> system, FieldGrid grid,
                                 std::vector<Point> points)
    : system_(std::move(system)), grid_(grid), points_(std::move(points)) {
  levels_ = points_.empty() ? 0 : points_.front().levels.size();
}

double TrackedSpectrum::energy(std::size_t k, int label) const {
  const Point& p = points_[k];
  return p.levels.eigen.values[p.column[static_cast<std::size_t>(label)]];
}

double TrackedSpectrum::sz(std::size_t k, int label) const {
  const Point& p = points_[k];
  return p.levels.sz[static_cast<std::size_t>(p.column[static_cast<std::size_t>(label)])];
}

double TrackedSpectrum::kz(std::size_t k, int label) const {
  const Point& p = points_[k];
  return p.levels.kz[static_cast<std::size_t>(p.column[static_cast<std::size_t>(label)])];
}

double TrackedSpectrum::sz2(std::size_t k, int label) const {
  const Point& p = points_[k];
  return p.levels.sz2[static_cast<std::size_t>(p.column[static_cast<std::size_t>(label)])];
}

Manifold TrackedSpectrum::manifold(std::size_t k, int label) const {
  const Point& p = points_[k];
  return p.levels.manifold[static_cast<std::size_t>(p.column[static_cast<std::size_t>(label)])];
}

ComplexVector TrackedSpectrum::state(std::size_t k, int label) const {
  const Point& p = points_[k];
  return p.levels.eigen.vectors.col(p.column[static_cast<std::size_t>(label)]);
}

std::size_t TrackedSpectrum::nearest(double b) const {
  std::size_t best = 0;
  double dist = std::abs(field(0) - b);
  for (std::size_t k = 1; k < points_.size(); ++k) {
    const double d = std::abs(field(k) - b);
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  return best;
}

std::vector<int> match_levels(const ComplexMatrix& previous_states, const ComplexMatrix& next,
                              double min_overlap, double b_from, double b_to) {
  const ComplexMatrix overlap = previous_states.adjoint() * next;
  const Eigen::MatrixXd weight = overlap.cwiseAbs2();
  const Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(weight.rows(), weight.cols()) - weight;
  std::vector<int> assignment = solve_assignment(cost);
  for (std::size_t t = 0; t < assignment.size(); ++t) {
    const double mag = std::sqrt(weight(static_cast<Eigen::Index>(t), assignment[t]));
    if (mag < min_overlap) {
      std::ostringstream msg;
      msg << "level tracking is ambiguous between B = " << b_from << " G and B = " << b_to
          << " G (trajectory " << t << " overlap " << mag << " < " << min_overlap
          << "); halve the field step and retry";
      throw AmbiguityError(msg.str());
    }
  }
  return assignment;
}

TrackedSpectrum sweep_eigen(std::shared_ptr<const SpinSystem> system, const FieldGrid& requested,
                            const SweepOptions& options) {
  if (!system) throw InvalidArgument("sweep_eigen: null system");
  FieldGrid grid = requested;
  if (requested.start() == 0.0) {
    const double start = std::max(requested.start(), options.zero_field_start);
    grid = FieldGrid(start, requested.end(), std::min(requested.step(), requested.end() - start));
  }

  std::vector<TrackedSpectrum::Point> points;
  points.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    TrackedSpectrum::Point p;
    p.levels = diagonalize(*system, grid.at(k));
    points.push_back(std::move(p));
  }

  const int n = points.front().levels.size();
  ComplexMatrix trajectory_states(n, n);
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto& p = points[k];
    if (k == 0) {
      p.column.resize(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t) p.column[static_cast<std::size_t>(t)] = t;
    } else {
      p.column = match_levels(trajectory_states, p.levels.eigen.vectors, options.min_overlap,
                              points[k - 1].levels.b_gauss, p.levels.b_gauss);
    }
    for (int t = 0; t < n; ++t)
      trajectory_states.col(t) = p.levels.eigen.vectors.col(p.column[static_cast<std::size_t>(t)]);
  }
  return TrackedSpectrum(std::move(system), grid, std::move(points));
}

namespace {

// Label of a trajectory at the grid point nearest to k where it is not mixed.
Manifold settled_manifold(const TrackedSpectrum& tracked, std::size_t k, int label) {
  const auto n = static_cast<std::ptrdiff_t>(tracked.points());
  const auto center = static_cast<std::ptrdiff_t>(k);
  for (std::ptrdiff_t d = 0; d < n; ++d) {
    for (std::ptrdiff_t j : {center - d, center + d}) {
      if (j < 0 || j >= n) continue;
      const Manifold m = tracked.manifold(static_cast<std::size_t>(j), label);
      if (m) return m;
    }
  }
  return std::nullopt;
}

int lac_set(const Manifold& a, const Manifold& b) {
  if (!a || !b) return 0;
  const int lo = std::min(*a, *b), hi = std::max(*a, *b);
  if (lo == -1 && hi == 1) return 1;
  if (lo == -1 && hi == 0) return 2;
  return 0;
}

}  // namespace

std::vector<LacRecord> find_lacs(const TrackedSpectrum& tracked, const LacOptions& options) {
  std::vector<LacRecord> out;
  const std::size_t np = tracked.points();
  if (np < 3) return out;
  const int n = tracked.levels();
  const SpinSystem& system = tracked.system();

  auto gap = [&](std::size_t k, int rank) {
    const auto& values = tracked.point(k).levels.eigen.values;
    return values[rank + 1] - values[rank];
  };

  for (int rank = 0; rank + 1 < n; ++rank) {
    for (std::size_t k = 1; k + 1 < np; ++k) {
      const double g = gap(k, rank);
      if (!(g <= gap(k - 1, rank) && g < gap(k + 1, rank))) continue;

      auto rank_gap = [&](double b) {
        const EigenSolution eig = hermitian_eig(system.hamiltonian(b));
        return eig.values[rank + 1] - eig.values[rank];
      };
      const ScalarMinimum m = golden_section_minimize(rank_gap, tracked.field(k - 1),
                                                      tracked.field(k + 1), options.refine_tol);

      // Trajectories sitting at ranks (rank, rank + 1) at the grid minimum.
      const auto& column = tracked.point(k).column;
      int la = -1, lb = -1;
      for (int t = 0; t < n; ++t) {
        if (column[static_cast<std::size_t>(t)] == rank) la = t;
        if (column[static_cast<std::size_t>(t)] == rank + 1) lb = t;
      }

      LacRecord rec;
      rec.level_a = la;
      rec.level_b = lb;
      rec.manifold_a = settled_manifold(tracked, k, la);
      rec.manifold_b = settled_manifold(tracked, k, lb);
      rec.b_star = m.x;
      rec.min_gap = std::max(0.0, std::min(m.fx, g));
      if (g < m.fx) rec.b_star = tracked.field(k);
      rec.set = lac_set(rec.manifold_a, rec.manifold_b);
      out.push_back(rec);
    }
  }
  std::sort(out.begin(), out.end(), [](const LacRecord& x, const LacRecord& y) {
    if (x.b_star != y.b_star) return x.b_star < y.b_star;
    if (x.level_a != y.level_a) return x.level_a < y.level_a;
    return x.level_b < y.level_b;
  });
  return out;
}

}  // namespace nvdpt
