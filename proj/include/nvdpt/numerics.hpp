#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace nvdpt {

// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with potentials).
// Returns row -> column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

// Golden-section search for a minimum of f on [lo, hi]; stops when the bracket is
// narrower than tol. The returned point is the best one evaluated.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol);

struct QuadraticFit {
  double value = 0.0;   // fitted f(x0)
  double slope = 0.0;   // f'(x0)
  double second = 0.0;  // f''(x0)
};

// Least-squares y ~ c0 + c1 (x - x0) + c2 (x - x0)^2. Needs at least 3 points.
QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y, double x0);

}  // namespace nvdpt
