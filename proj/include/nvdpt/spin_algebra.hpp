#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace nvdpt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// 3x3 real coupling tensor in MHz, indices (x, y, z).
using Tensor3 = Eigen::Matrix3d;

struct SpinOperators {
  double s = 0.0;
  ComplexMatrix sx, sy, sz, s2;

  int dim() const { return static_cast<int>(sz.rows()); }
};

// Angular momentum matrices in the |s, m> basis ordered m = s, s-1, ..., -s.
// Throws InvalidArgument unless 2s is a non-negative integer.
SpinOperators spin_matrices(double s);

// Kronecker embedding of `op` into slot `slot` of a product space with subspace
// dimensions `dims`; identity on every other slot.
ComplexMatrix embed(const ComplexMatrix& op, std::size_t slot, std::span<const int> dims);

// Rotation by `phi` about the z axis.
Eigen::Matrix3d z_rotation(double phi);

// R(phi) * a * R(phi)^T.
Tensor3 rotate_tensor(const Tensor3& a, double phi);

struct EigenSolution {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // column k belongs to values[k]
};

struct EigenOptions {
  // Relative to the largest entry magnitude.
  double hermiticity_tol = 1e-12;
  // Off-diagonal Frobenius norm relative to the diagonal norm.
  double convergence_tol = 1e-12;
  int max_sweeps = 64;
  // Eigenvalues closer than this (absolute) form a degenerate block.
  double degeneracy_tol = 1e-9;
};

// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
//
// Inside every degenerate block the basis is fixed by diagonalizing the projection of
// each observable in `tie_break` in turn (remaining degeneracy handed to the next one),
// ordered by descending expectation value. Every eigenvector is then phased so that its
// largest-magnitude component is real and positive (first such index on ties).
//
// Throws InvalidArgument for non-Hermitian input and NumericalError when the sweep cap
// is hit.
EigenSolution hermitian_eig(const ComplexMatrix& m, std::span<const ComplexMatrix> tie_break = {},
                            const EigenOptions& options = {});

// Expectation value <v|op|v> (real part) for a normalized vector.
double expectation(const ComplexMatrix& op, const ComplexVector& v);

double max_abs_entry(const ComplexMatrix& m);

}  // namespace nvdpt
