#include "nvdpt/numerics.hpp"

#include "nvdpt/error.hpp"

#include <cmath>
#include <limits>

namespace nvdpt {

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw InvalidArgument("solve_assignment: cost matrix must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol) {
  if (!(lo <= hi)) throw InvalidArgument("golden_section_minimize: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarMinimum best;
  best.fx = std::numeric_limits<double>::infinity();
  auto eval = [&](double x) {
    const double y = f(x);
    ++best.evaluations;
    if (y < best.fx) {
      best.fx = y;
      best.x = x;
    }
    return y;
  };

  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  eval(0.5 * (a + b));
  return best;
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y, double x0) {
  if (x.size() != y.size()) throw InvalidArgument("fit_quadratic: x and y differ in length");
  if (x.size() < 3) throw InvalidArgument("fit_quadratic: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dx = x[static_cast<std::size_t>(k)] - x0;
    design(k, 0) = 1.0;
    design(k, 1) = dx;
    design(k, 2) = dx * dx;
    rhs[k] = y[static_cast<std::size_t>(k)];
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
  return {c[0], c[1], 2.0 * c[2]};
}

}  // namespace nvdpt
