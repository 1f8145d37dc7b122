#include "nvdpt/spin_algebra.hpp"

#include "nvdpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nvdpt {

namespace {

bool is_half_integer(double s) {
  const double twice = 2.0 * s;
  return std::isfinite(s) && s >= 0.0 && std::abs(twice - std::round(twice)) < 1e-12;
}

// Off-diagonal Frobenius norm and diagonal norm.
std::pair<double, double> split_norms(const ComplexMatrix& a) {
  double off = 0.0, diag = 0.0;
  const auto n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m2 = std::norm(a(i, j));
      if (i == j)
        diag += m2;
      else
        off += m2;
    }
  }
  return {std::sqrt(off), std::sqrt(diag)};
}

// Zeroes a(p, q) with the unitary G = diag(1, e^{-i theta}) * Givens(c, s), A <- G^H A G.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const Complex phase = apq / r;  // e^{i theta}
  const Complex phase_c = std::conj(phase);
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double tau = (aqq - app) / (2.0 * r);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // G_pp = c, G_pq = s, G_qp = -s e^{-i theta}, G_qq = c e^{-i theta}
  const Complex gqp = -s * phase_c;
  const Complex gqq = c * phase_c;
  const auto n = a.rows();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * c + akq * gqp;
    a(k, q) = akp * s + akq * gqq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk + std::conj(gqp) * aqk;
    a(q, k) = s * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * c + vkq * gqp;
    v(k, q) = vkp * s + vkq * gqq;
  }
}

EigenSolution jacobi_core(const ComplexMatrix& m, const EigenOptions& options) {
  const auto n = m.rows();
  ComplexMatrix a = 0.5 * (m + m.adjoint());
  ComplexMatrix v = ComplexMatrix::Identity(n, n);

  bool converged = n <= 1;
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    const auto [off, diag] = split_norms(a);
    if (off == 0.0 || off < options.convergence_tol * diag) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
  }
  if (!converged) {
    const auto [off, diag] = split_norms(a);
    if (off == 0.0 || off < options.convergence_tol * diag)
      converged = true;
    else
      throw NumericalError("hermitian_eig: Jacobi iteration did not converge after " +
                           std::to_string(options.max_sweeps) + " sweeps (off-diagonal norm " +
                           std::to_string(off) + ")");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() < a(y, y).real();
  });

  EigenSolution out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

void fix_phase(ComplexMatrix& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    auto col = vectors.col(k);
    double best = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) best = std::max(best, std::abs(col[i]));
    if (best == 0.0) continue;
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) >= best * (1.0 - 1e-9)) {
        pick = i;
        break;
      }
    }
    const Complex ph = std::conj(col[pick]) / std::abs(col[pick]);
    col *= ph;
    col[pick] = std::abs(col[pick]);
  }
}

// Fixes the basis of the block of columns [begin, end) using the observables in turn.
void canonicalize_block(ComplexMatrix& vectors, Eigen::Index begin, Eigen::Index end,
                        std::span<const ComplexMatrix> tie_break, const EigenOptions& options) {
  const Eigen::Index width = end - begin;
  if (width < 2 || tie_break.empty()) return;

  ComplexMatrix block = vectors.middleCols(begin, width);
  // Re-orthonormalize; Jacobi vectors are orthonormal already, this only removes drift.
  Eigen::HouseholderQR<ComplexMatrix> qr(block);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(block.rows(), width);
  // Keep the span but preserve orientation as far as possible.
  block = q;

  const ComplexMatrix& obs = tie_break.front();
  const ComplexMatrix projected = block.adjoint() * obs * block;
  EigenOptions inner = options;
  EigenSolution sub = jacobi_core(0.5 * (projected + projected.adjoint()), inner);

  // Descending expectation value.
  ComplexMatrix rotated(block.rows(), width);
  Eigen::VectorXd sub_values(width);
  for (Eigen::Index k = 0; k < width; ++k) {
    rotated.col(k) = block * sub.vectors.col(width - 1 - k);
    sub_values[k] = sub.values[width - 1 - k];
  }
  vectors.middleCols(begin, width) = rotated;

  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k <= width; ++k) {
    if (k == width || std::abs(sub_values[k - 1] - sub_values[k]) > options.degeneracy_tol) {
      canonicalize_block(vectors, begin + start, begin + k, tie_break.subspan(1), options);
      start = k;
    }
  }
}

}  // namespace

SpinOperators spin_matrices(double s) {
  if (!is_half_integer(s))
    throw InvalidArgument("spin_matrices: spin must be a non-negative half-integer, got " +
                          std::to_string(s));
  const int dim = static_cast<int>(std::lround(2.0 * s)) + 1;
  SpinOperators ops;
  ops.s = s;
  ops.sz = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix raise = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = s - k;
    ops.sz(k, k) = m;
    if (k > 0) raise(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix lower = raise.adjoint();
  ops.sx = 0.5 * (raise + lower);
  ops.sy = Complex(0.0, -0.5) * (raise - lower);
  ops.s2 = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
  return ops;
}

ComplexMatrix embed(const ComplexMatrix& op, std::size_t slot, std::span<const int> dims) {
  if (slot >= dims.size())
    throw InvalidArgument("embed: slot " + std::to_string(slot) + " out of range for " +
                          std::to_string(dims.size()) + " subspaces");
  if (op.rows() != dims[slot] || op.cols() != dims[slot])
    throw InvalidArgument("embed: operator dimension " + std::to_string(op.rows()) +
                          " does not match subspace dimension " + std::to_string(dims[slot]));
  Eigen::Index left = 1, right = 1;
  for (std::size_t k = 0; k < slot; ++k) left *= dims[k];
  for (std::size_t k = slot + 1; k < dims.size(); ++k) right *= dims[k];
  const Eigen::Index d = op.rows();
  const Eigen::Index total = left * d * right;

  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const Complex x = op(i, j);
        if (x == Complex(0.0)) continue;
        for (Eigen::Index r = 0; r < right; ++r)
          out((l * d + i) * right + r, (l * d + j) * right + r) = x;
      }
  return out;
}

Eigen::Matrix3d z_rotation(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Tensor3 rotate_tensor(const Tensor3& a, double phi) {
  const Eigen::Matrix3d r = z_rotation(phi);
  return r * a * r.transpose();
}

double max_abs_entry(const ComplexMatrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, std::abs(m(i, j)));
  return best;
}

double expectation(const ComplexMatrix& op, const ComplexVector& v) {
  return v.dot(op * v).real();
}

EigenSolution hermitian_eig(const ComplexMatrix& m, std::span<const ComplexMatrix> tie_break,
                            const EigenOptions& options) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw InvalidArgument("hermitian_eig: matrix must be square and non-empty");
  const double scale = max_abs_entry(m);
  const double asym = max_abs_entry(m - m.adjoint());
  if (asym > options.hermiticity_tol * std::max(scale, 1e-300))
    throw InvalidArgument("hermitian_eig: matrix is not Hermitian (max |M - M^H| = " +
                          std::to_string(asym) + ")");
  for (const auto& obs : tie_break)
    if (obs.rows() != m.rows() || obs.cols() != m.cols())
      throw InvalidArgument("hermitian_eig: tie-break observable has the wrong dimension");

  EigenSolution out = jacobi_core(m, options);
  const Eigen::Index n = out.values.size();
  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k == n || out.values[k] - out.values[k - 1] > options.degeneracy_tol) {
      canonicalize_block(out.vectors, start, k, tie_break, options);
      start = k;
    }
  }
  fix_phase(out.vectors);
  return out;
}

}  // namespace nvdpt
