#pragma once

#include "nvdpt/model.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nvdpt {

// Electron-spin manifold of a state: -1, 0, +1, or empty for mixed.
using Manifold = std::optional<int>;

std::string manifold_name(const Manifold& m);

// round(<S_z>) when both <S_z> and <S_z^2> sit within 0.4 of that label, else mixed.
Manifold classify_manifold(double sz_expect, double sz2_expect);
Manifold classify_manifold(const SpinSystem& system, const ComplexVector& state);

// One diagonalization with per-level observables, levels in ascending energy.
struct LevelSet {
  double b_gauss = 0.0;
  EigenSolution eigen;
  std::vector<double> sz, kz, sz2;
  std::vector<double> slope;  // <k|dH/dB|k>, MHz/G
  std::vector<Manifold> manifold;

  int size() const { return static_cast<int>(eigen.values.size()); }
};

// Diagonalizes H(b) with the canonical degenerate-block ordering (<S_z>, then <K_z>).
LevelSet diagonalize(const SpinSystem& system, double b_gauss);

class FieldGrid {
 public:
  FieldGrid(double b_start, double b_end, double step);

  double start() const { return start_; }
  double end() const { return end_; }
  double step() const { return step_; }
  std::size_t size() const { return count_; }
  double at(std::size_t k) const { return start_ + static_cast<double>(k) * step_; }

 private:
  double start_, end_, step_;
  std::size_t count_;
};

struct SweepOptions {
  // Smallest allowed |<v_prev|v_next>| of an assigned pair.
  double min_overlap = 0.5;
  // Used as the first point when the requested start is exactly zero.
  double zero_field_start = 0.1;
};

// Eigenlevels followed across a field grid. Trajectory labels 0..n-1 follow the ascending
// energy order at the first grid point.
class TrackedSpectrum {
 public:
  struct Point {
    LevelSet levels;
    std::vector<int> column;  // trajectory label -> eigen column at this point
  };

  TrackedSpectrum(std::shared_ptr<const SpinSystem> system, FieldGrid grid,
                  std::vector<Point> points);

  const SpinSystem& system() const { return *system_; }
  std::shared_ptr<const SpinSystem> system_ptr() const { return system_; }
  const FieldGrid& grid() const { return grid_; }
  std::size_t points() const { return points_.size(); }
  int levels() const { return levels_; }
  double field(std::size_t k) const { return points_[k].levels.b_gauss; }
  const Point& point(std::size_t k) const { return points_[k]; }

  double energy(std::size_t k, int label) const;
  double sz(std::size_t k, int label) const;
  double kz(std::size_t k, int label) const;
  double sz2(std::size_t k, int label) const;
  Manifold manifold(std::size_t k, int label) const;
  ComplexVector state(std::size_t k, int label) const;

  // Grid index closest to b.
  std::size_t nearest(double b) const;

 private:
  std::shared_ptr<const SpinSystem> system_;
  FieldGrid grid_;
  std::vector<Point> points_;
  int levels_ = 0;
};

// Optimal matching of `next` eigenvectors to the trajectories in `previous_states`
// (columns ordered by trajectory label). Returns trajectory -> eigen column of `next`.
// Throws AmbiguityError when an assigned overlap magnitude is below min_overlap.
std::vector<int> match_levels(const ComplexMatrix& previous_states, const ComplexMatrix& next,
                              double min_overlap, double b_from, double b_to);

TrackedSpectrum sweep_eigen(std::shared_ptr<const SpinSystem> system, const FieldGrid& grid,
                            const SweepOptions& options = {});

struct LacRecord {
  int level_a = 0;  // trajectory labels at the grid minimum, a below b
  int level_b = 0;
  Manifold manifold_a, manifold_b;
  double b_star = 0.0;   // G
  double min_gap = 0.0;  // MHz
  int set = 0;           // 1: m_S=-1 with +1; 2: m_S=-1 with 0; 0: other
};

struct LacOptions {
  double refine_tol = 0.01;  // G
};

// Local minima of adjacent-level gaps on the grid, refined by golden-section search.
std::vector<LacRecord> find_lacs(const TrackedSpectrum& tracked, const LacOptions& options = {});

}  // namespace nvdpt
